#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "trellis/channel.hpp"
#include "trellis/moments.hpp"
#include "trellis/trellis.hpp"

namespace trellis {

/// Restriction to the subcode C_i(x) of codewords with c_i = x.
struct SymbolConstraint {
    int depth = 0;
    double symbol = 0.0;
};

/**
 * E[(c w^T)^m | r] for m = 0..max_order under the posterior P(c | r) of a
 * uniform prior on the codewords of `code`, or on the subcode when a
 * constraint is given. λ-labels of `code` are replaced by channel
 * likelihoods of `received`.
 */
std::vector<double> correlation_moments(const Trellis& code, const ChannelModel& channel,
                                        std::span<const double> received, std::span<const double> word,
                                        unsigned max_order, std::optional<SymbolConstraint> constraint = std::nullopt,
                                        RunOptions options = {});

struct EntropyResult {
    double entropy = 0.0;          // bits
    double mean_correlation = 0.0; // E[c r^T | r]
    double log2_flow = 0.0;        // log2 of the (sub)code's total likelihood
    UncertaintyConstants constants;
};

/**
 * H(C | r) = sum over c of P(c|r) H(c|r), evaluated as k1 - k2 E[c r^T | r]
 * with k1a = log2 of the total likelihood. With a constraint the posterior
 * is that of the subcode, renormalized to sum to one.
 */
EntropyResult conditional_entropy(const Trellis& code, const ChannelModel& channel, std::span<const double> received,
                                  std::optional<SymbolConstraint> constraint = std::nullopt, RunOptions options = {});

/// E[H(c|r)^m | r] for m = 0..max_order via the binomial expansion of
/// (k1 - k2 c r^T)^m over correlation moments.
std::vector<double> uncertainty_moments(const Trellis& code, const ChannelModel& channel,
                                        std::span<const double> received, unsigned max_order,
                                        std::optional<SymbolConstraint> constraint = std::nullopt);

/// (symbol, P(c_i = symbol | r)) for each depth i = 1..n (index i - 1).
using SymbolPosteriors = std::vector<std::vector<std::pair<double, double>>>;

/// Plain BCJR on a λ-labeled trellis with per-layer rescaling.
SymbolPosteriors bcjr_symbol_posteriors(const Trellis& labeled);

double posterior_of(const SymbolPosteriors& posteriors, int depth, double symbol);

/// sum over i of r_i * sum over x of x P(c_i = x | r), which is E[c r^T | r].
double bcjr_mean_correlation(const SymbolPosteriors& posteriors, std::span<const double> received);

} // namespace trellis
