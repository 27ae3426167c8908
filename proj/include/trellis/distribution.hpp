#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "trellis/depth_function.hpp"
#include "trellis/moments.hpp"
#include "trellis/trellis.hpp"

namespace trellis {

/// Common lattice of f values: every g is an integer multiple of `unit`, and
/// values at the same depth differ by multiples of `step_units * unit`.
struct Lattice {
    double unit = 1.0;
    std::int64_t step_units = 1;

    double step() const { return unit * static_cast<double>(step_units); }
};

/**
 * Mass function on the lattice points offset + k * step, k = 0..size-1.
 * Offsets are kept as integer multiples of the lattice unit, so shifts and
 * convolutions never accumulate rounding in the domain.
 * A distribution with no points is the zero distribution.
 */
class ExactDistribution {
public:
    explicit ExactDistribution(Lattice lattice = {}) : lattice_(lattice) {}

    /// All mass 1 at `at`, which must lie on the lattice.
    static ExactDistribution dirac(Lattice lattice, double at = 0.0);
    /// Masses at (origin_units + k * step_units) * unit.
    static ExactDistribution from_mass(Lattice lattice, std::int64_t origin_units, std::vector<double> mass);

    const Lattice& lattice() const { return lattice_; }
    double step() const { return lattice_.step(); }
    double offset() const { return static_cast<double>(origin_) * lattice_.unit; }
    std::int64_t origin_units() const { return origin_; }

    const std::vector<double>& mass() const { return mass_; }
    std::size_t size() const { return mass_.size(); }
    bool empty() const { return mass_.empty(); }
    double value(std::size_t k) const;

    double total() const;
    /// Raw moment sum over u of u^m * mass(u).
    double moment(unsigned m) const;
    /// Mass at `u`; zero off the domain or off the lattice.
    double mass_at(double u) const;

    /// Domain moved by b (the lengthening by one edge). b must be a lattice
    /// multiple of the unit.
    ExactDistribution shifted(double b) const;
    ExactDistribution scaled(double factor) const;
    /// Divided by the total mass; unchanged when the total is zero.
    ExactDistribution normalized() const;
    /// Domain extended with zero mass to cover [lo, hi].
    ExactDistribution padded(double lo, double hi) const;

    /// this += weight * other. Domains must share the lattice and the residue
    /// of the offset modulo the step.
    void accumulate(const ExactDistribution& other, double weight = 1.0);

    std::vector<std::pair<double, double>> points() const;

private:
    std::int64_t to_units(double value) const;

    Lattice lattice_;
    std::int64_t origin_ = 0;
    std::vector<double> mass_;
};

/// Discrete convolution: the distribution of the sum of the two variables.
ExactDistribution convolve(const ExactDistribution& a, const ExactDistribution& b);

/**
 * Fixed-width binned distribution: 2N+1 bins of width `width`, bin k
 * (k = 0..2N) centered at center + (k - N) * width.
 */
struct QuantizedDistribution {
    double center = 0.0;
    double width = 1.0;
    std::vector<double> mass;

    static QuantizedDistribution dirac(int half_bins, double width, double at = 0.0);
    static QuantizedDistribution zero(int half_bins, double width, double center = 0.0);

    int half_bins() const { return static_cast<int>(mass.size() / 2); }
    double value(std::size_t k) const { return center + (static_cast<double>(k) - half_bins()) * width; }
    double total() const;
    double moment(unsigned m) const;

    /// Lengthening: the whole binned distribution moves by b.
    QuantizedDistribution shifted(double b) const;
    QuantizedDistribution scaled(double factor) const;
    QuantizedDistribution normalized() const;

    std::vector<std::pair<double, double>> points() const;
};

/**
 * Re-bins `d` onto a grid of 2 * out_half_bins + 1 bins centered at
 * d.center + delta_mu, of the same width. The content of each source bin
 * is split linearly between the two target bins around its position;
 * content falling beyond either end accumulates in the end bin. Total mass
 * is conserved. Shifts within 1e-9 of a whole number of bins are treated
 * as whole.
 */
QuantizedDistribution redistribute(const QuantizedDistribution& d, double delta_mu, int out_half_bins);
QuantizedDistribution redistribute(const QuantizedDistribution& d, double delta_mu);

/// Full convolution of two equal-width binned distributions; the result has
/// N_a + N_b half bins and center a.center + b.center.
QuantizedDistribution convolve(const QuantizedDistribution& a, const QuantizedDistribution& b);

/**
 * Placement of each joined grid. `mean` centers it on the weighted mean of
 * the incoming contributions. `lattice` rounds that mean to the nearest
 * point of the first contribution's grid, so that lattice-valued inputs
 * with matching bin width are binned without interpolation.
 */
enum class Anchor { mean, lattice };

struct QuantizationParams {
    int half_bins = 32;
    double bin_width = 1.0;
    Anchor anchor = Anchor::mean;
};

/// N = 32 and 2N * width = 8 standard deviations of f over the trellis
/// (width 1 when f is deterministic).
QuantizationParams default_quantization(const Trellis& trellis, const DepthFunctionTable& g);

/// The common lattice of the f values, if one exists with at most
/// `max_points` points between the smallest and largest possible f.
std::optional<Lattice> detect_lattice(const Trellis& trellis, const DepthFunctionTable& g,
                                      std::size_t max_points = 1'000'000);

/// [sum of per-section minima of g, sum of per-section maxima].
std::pair<double, double> natural_domain(const Trellis& trellis, const DepthFunctionTable& g);

/// [-B, B] with B the sum over sections of max |g|. Exact distributions are
/// reported on the lattice points of this range, which for g = c-label is
/// {-n, -n+2, ..., n}.
std::pair<double, double> symmetric_domain(const Trellis& trellis, const DepthFunctionTable& g);

/// Forward or backward exact distributions at every vertex.
struct ExactState {
    Direction direction = Direction::forward;
    Lattice lattice;
    std::pair<double, double> domain;
    std::vector<ExactDistribution> at;
};

/// Forward or backward binned distributions, plus the exact mean of f over
/// the head (or tail) paths of each vertex.
struct QuantizedState {
    Direction direction = Direction::forward;
    QuantizationParams params;
    std::vector<QuantizedDistribution> at;
    std::vector<double> mean;
};

/// Throws Error when g has no common lattice.
ExactState exact_distributions(const Trellis& trellis, const DepthFunctionTable& g, Direction direction,
                               RunOptions options = {});
ExactState exact_distributions(const Trellis& trellis, const DepthFunctionTable& g, const Lattice& lattice,
                               Direction direction, RunOptions options = {});

QuantizedState quantized_distributions(const Trellis& trellis, const DepthFunctionTable& g, Direction direction,
                                       const QuantizationParams& params, RunOptions options = {});

/// Distribution of f over all A -> B paths assembled at cut depth i, padded
/// to the symmetric domain.
ExactDistribution trellis_distribution(const Trellis& trellis, const ExactState& forward, const ExactState& backward,
                                       int cut);
QuantizedDistribution trellis_distribution(const Trellis& trellis, const QuantizedState& forward,
                                           const QuantizedState& backward, int cut);

/// Distribution of f over the paths whose depth-i edge has c-label x.
ExactDistribution symbol_distribution(const Trellis& trellis, const DepthFunctionTable& g, const ExactState& forward,
                                      const ExactState& backward, int depth, double symbol);
QuantizedDistribution symbol_distribution(const Trellis& trellis, const DepthFunctionTable& g,
                                          const QuantizedState& forward, const QuantizedState& backward, int depth,
                                          double symbol);

} // namespace trellis
