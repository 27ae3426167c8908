#pragma once

#include <array>
#include <cstdint>

namespace trellis {

/// Largest moment order supported; C(64, l) still fits in 64 bits.
inline constexpr unsigned max_supported_order = 64;

/// Exact binomial coefficients C(m, l) for m <= max_supported_order,
/// built once from Pascal's triangle.
class BinomialTable {
public:
    static const BinomialTable& instance()
    {
        static const BinomialTable table;
        return table;
    }

    std::uint64_t operator()(unsigned m, unsigned l) const
    {
        if (l > m || m > max_supported_order) return 0;
        return rows_[m][l];
    }

private:
    BinomialTable()
    {
        for (auto& row : rows_) row.fill(0);
        for (unsigned m = 0; m <= max_supported_order; ++m) {
            rows_[m][0] = 1;
            for (unsigned l = 1; l <= m; ++l) rows_[m][l] = rows_[m - 1][l - 1] + rows_[m - 1][l];
        }
    }

    std::array<std::array<std::uint64_t, max_supported_order + 1>, max_supported_order + 1> rows_{};
};

} // namespace trellis
