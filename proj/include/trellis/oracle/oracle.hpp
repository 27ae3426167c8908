#pragma once

// Brute-force path enumeration used as ground truth for the recursive
// engines. Everything here is exponential in the trellis rank and refuses
// to run past a path cap.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "trellis/channel.hpp"
#include "trellis/depth_function.hpp"
#include "trellis/semiring.hpp"
#include "trellis/trellis.hpp"

namespace trellis::oracle {

/// 2^14 unless overridden by the TRELLIS_PATH_CAP environment variable.
std::size_t path_cap();

/// Restricts a sum to paths whose edge at depth `depth` has c-label `symbol`.
struct Constraint {
    int depth = 0;
    double symbol = 0.0;
};

/// True when `path` crosses depth `constraint.depth` on an edge with the
/// required c-label.
bool satisfies(const Trellis& trellis, const Path& path, const Constraint& constraint);

/**
 * Sum over paths P from `from` to `to` of lambda(P) * f(P)^m, with lambda
 * and g given as carrier values per edge. f(P) is the semiring sum of g over
 * P's edges; the empty path has f = zero and lambda = one.
 */
template <Semiring S>
typename S::value_type moment(const Trellis& trellis, const std::vector<typename S::value_type>& lambda,
                              const std::vector<typename S::value_type>& g, unsigned m,
                              std::optional<Constraint> constraint, VertexId from, VertexId to)
{
    auto total = S::zero();
    for (const Path& path : enumerate_paths(trellis, from, to, path_cap())) {
        if (constraint && !satisfies(trellis, path, *constraint)) continue;
        auto weight = S::one();
        auto f = S::zero();
        for (EdgeId e : path) {
            weight = S::mul(weight, lambda[e]);
            f = S::add(f, g[e]);
        }
        total = S::add(total, S::mul(weight, power<S>(f, m)));
    }
    return total;
}

/// Same sum with lambda and g lifted from their real-domain values.
template <Semiring S>
typename S::value_type moment(const Trellis& trellis, const DepthFunctionTable& g, unsigned m,
                              std::optional<Constraint> constraint = std::nullopt)
{
    return moment<S>(trellis, g, m, constraint, trellis.source(), trellis.sink());
}

template <Semiring S>
typename S::value_type moment(const Trellis& trellis, const DepthFunctionTable& g, unsigned m,
                              std::optional<Constraint> constraint, VertexId from, VertexId to)
{
    std::vector<typename S::value_type> lambda(trellis.num_edges());
    std::vector<typename S::value_type> lifted(trellis.num_edges());
    for (const Edge& e : trellis.edges()) {
        lambda[e.id] = S::from_real(e.lambda);
        lifted[e.id] = S::from_real(g[e.id]);
    }
    return moment<S>(trellis, lambda, lifted, m, constraint, from, to);
}

/// Real-arithmetic moment together with sum |lambda(P) f(P)^m|, the scale
/// against which rounding error of any summation order is bounded.
struct RealSum {
    double value = 0.0;
    double magnitude = 0.0;
    std::size_t paths = 0;
};

RealSum real_moment(const Trellis& trellis, const DepthFunctionTable& g, unsigned m,
                    std::optional<Constraint> constraint = std::nullopt);
RealSum real_moment(const Trellis& trellis, const DepthFunctionTable& g, unsigned m,
                    std::optional<Constraint> constraint, VertexId from, VertexId to);

/// Sum over paths A -> v of f_y(P)^k f_z(P)^m lambda(P).
RealSum joint_moment(const Trellis& trellis, const DepthFunctionTable& gy, const DepthFunctionTable& gz, unsigned k,
                     unsigned m, VertexId to);

/// Mass lambda(P) accumulated per distinct value of f(P); values closer
/// than 1e-12 (relative to max(1, |value|)) share a bin. Sorted by value.
using Histogram = std::vector<std::pair<double, double>>;

Histogram distribution(const Trellis& trellis, const DepthFunctionTable& g,
                       std::optional<Constraint> constraint = std::nullopt);
Histogram distribution(const Trellis& trellis, const DepthFunctionTable& g, std::optional<Constraint> constraint,
                       VertexId from, VertexId to);

/// C-label sequences of all paths A -> B, in enumeration order.
std::vector<std::vector<double>> codewords(const Trellis& trellis);

/// P(r | c) as a direct product over positions.
double likelihood(const ChannelModel& channel, std::span<const double> codeword, std::span<const double> received);

/**
 * Entropy in bits of the posterior P(c | r) over `words` under a uniform
 * prior; with a constraint, of the posterior restricted (and renormalized)
 * to codewords with c_depth = symbol.
 */
double posterior_entropy(const std::vector<std::vector<double>>& words, const ChannelModel& channel,
                         std::span<const double> received, std::optional<Constraint> constraint = std::nullopt);

/// Posterior-weighted mean of (c w^T)^m over `words` (optionally constrained).
double correlation_moment(const std::vector<std::vector<double>>& words, const ChannelModel& channel,
                          std::span<const double> received, std::span<const double> word, unsigned m,
                          std::optional<Constraint> constraint = std::nullopt);

/// P(c_depth = symbol | r) by direct summation over codewords.
double symbol_probability(const std::vector<std::vector<double>>& words, const ChannelModel& channel,
                          std::span<const double> received, int depth, double symbol);

/// Bipolar codeword of a feedforward convolutional code by direct
/// polynomial convolution: output j at time t is the XOR over delays d of
/// bit (memory - d) of generator j times the input bit u[t - d]. With
/// `terminated`, `memory` zero inputs are appended.
std::vector<double> convolutional_encode(const std::vector<unsigned>& generators, int memory,
                                         const std::vector<int>& info, bool terminated);

/// Shape of a random test trellis.
struct RandomTrellisSpec {
    int min_rank = 1;
    int max_rank = 8;
    int max_width = 4;
    int max_parallel = 2;
    std::size_t max_paths = 1024;
    double min_lambda = 0.05;
    double max_lambda = 2.0;
    std::vector<double> alphabet = {-1.0, 1.0};
};

/**
 * A valid trellis with random layer widths, random connectivity (every
 * vertex keeps an in- and out-edge), occasional parallel edges, lambda drawn
 * uniformly from [min_lambda, max_lambda] and c-labels from `alphabet`.
 * Redraws until the path count is at most `max_paths`.
 */
Trellis random_trellis(std::mt19937_64& rng, const RandomTrellisSpec& spec = {});

/// One uniform value per edge in [lo, hi].
DepthFunctionTable random_depth_function(std::mt19937_64& rng, const Trellis& trellis, double lo, double hi);

} // namespace trellis::oracle
