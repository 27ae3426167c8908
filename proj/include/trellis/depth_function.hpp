#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "trellis/trellis.hpp"

namespace trellis {

/**
 * Materialized per-edge values g_i(e), where i is the depth of the edge's
 * final vertex. The path function is f(P) = sum of g over the path's edges.
 * Entries may be NaN ("undefined"); the engines reject such tables.
 */
class DepthFunctionTable {
public:
    DepthFunctionTable() = default;
    explicit DepthFunctionTable(std::vector<double> values) : values_(std::move(values)) {}

    /// g_i(e) = c(e).
    static DepthFunctionTable from_clabels(const Trellis& trellis);

    /// g_i(e) = c(e) * w_i, giving f(P) = c(P) w^T.
    static DepthFunctionTable correlation(const Trellis& trellis, std::span<const double> word);

    /// g_i(e) = 0 everywhere.
    static DepthFunctionTable zeros(const Trellis& trellis);

    double operator[](EdgeId e) const { return values_[e]; }
    std::span<const double> values() const { return values_; }
    std::size_t size() const { return values_.size(); }

    /// Throws Error unless the table has one finite value per edge.
    void require_defined(const Trellis& trellis) const;

private:
    std::vector<double> values_;
};

} // namespace trellis
