#include "trellis/depth_function.hpp"

#include <string>

#include "trellis/errors.hpp"

namespace trellis {

DepthFunctionTable DepthFunctionTable::from_clabels(const Trellis& trellis)
{
    std::vector<double> g(trellis.num_edges());
    for (const Edge& e : trellis.edges()) g[e.id] = e.clabel;
    return DepthFunctionTable{std::move(g)};
}

DepthFunctionTable DepthFunctionTable::correlation(const Trellis& trellis, std::span<const double> word)
{
    if (word.size() != static_cast<std::size_t>(trellis.rank()))
        throw Error("word length " + std::to_string(word.size()) + " does not match trellis rank " +
                    std::to_string(trellis.rank()));
    std::vector<double> g(trellis.num_edges());
    for (const Edge& e : trellis.edges()) g[e.id] = e.clabel * word[static_cast<std::size_t>(trellis.depth(e.fin)) - 1];
    return DepthFunctionTable{std::move(g)};
}

DepthFunctionTable DepthFunctionTable::zeros(const Trellis& trellis)
{
    return DepthFunctionTable{std::vector<double>(trellis.num_edges(), 0.0)};
}

void DepthFunctionTable::require_defined(const Trellis& trellis) const
{
    if (values_.size() != trellis.num_edges())
        throw Error("depth function has " + std::to_string(values_.size()) + " entries for " +
                    std::to_string(trellis.num_edges()) + " edges");
    for (std::size_t e = 0; e < values_.size(); ++e)
        if (!std::isfinite(values_[e])) throw Error("depth function undefined on edge " + std::to_string(e));
}

} // namespace trellis
