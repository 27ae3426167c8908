#include "trellis/semiring.hpp"

namespace trellis {

std::optional<SemiringId> parse_semiring(std::string_view id)
{
    if (id == RealSemiring::name) return SemiringId::real;
    if (id == LogRealSemiring::name) return SemiringId::logreal;
    if (id == TropicalSemiring::name) return SemiringId::tropical;
    if (id == MaxProductSemiring::name) return SemiringId::maxprod;
    if (id == BooleanSemiring::name) return SemiringId::boolean;
    return std::nullopt;
}

std::string_view to_string(SemiringId id)
{
    return dispatch_semiring(id, [](auto s) { return std::string_view{decltype(s)::name}; });
}

} // namespace trellis
