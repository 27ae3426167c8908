#include "trellis/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "trellis/depth_function.hpp"
#include "trellis/errors.hpp"

namespace trellis {

namespace {

LogMoments posterior_moments(const Trellis& labeled, const DepthFunctionTable& g, unsigned max_order,
                             std::optional<SymbolConstraint> constraint, RunOptions options)
{
    const auto forward = normalized_states(labeled, g, max_order, Direction::forward, options);
    if (!constraint) return normalized_trellis_moments(labeled, forward);
    const auto backward = normalized_states(labeled, g, max_order, Direction::backward, options);
    auto out = normalized_symbol_moments(labeled, g, forward, backward, constraint->depth, constraint->symbol);
    if (out.moments.empty())
        throw Error("subcode with c_" + std::to_string(constraint->depth) + " = " + std::to_string(constraint->symbol) +
                    " is empty or has zero likelihood");
    return out;
}

} // namespace

std::vector<double> correlation_moments(const Trellis& code, const ChannelModel& channel,
                                        std::span<const double> received, std::span<const double> word,
                                        unsigned max_order, std::optional<SymbolConstraint> constraint,
                                        RunOptions options)
{
    const Trellis labeled = channel_lambda_labels(code, channel, received);
    const auto g = DepthFunctionTable::correlation(labeled, word);
    return posterior_moments(labeled, g, max_order, constraint, options).moments;
}

EntropyResult conditional_entropy(const Trellis& code, const ChannelModel& channel, std::span<const double> received,
                                  std::optional<SymbolConstraint> constraint, RunOptions options)
{
    const Trellis labeled = channel_lambda_labels(code, channel, received);
    const auto g = DepthFunctionTable::correlation(labeled, received);
    const auto moments = posterior_moments(labeled, g, 1, constraint, options);
    EntropyResult result;
    result.log2_flow = moments.log_flow / std::numbers::ln2;
    result.mean_correlation = moments.moments[1];
    result.constants = uncertainty_constants(channel, received, result.log2_flow);
    result.entropy = result.constants.uncertainty(result.mean_correlation);
    return result;
}

std::vector<double> uncertainty_moments(const Trellis& code, const ChannelModel& channel,
                                        std::span<const double> received, unsigned max_order,
                                        std::optional<SymbolConstraint> constraint)
{
    const Trellis labeled = channel_lambda_labels(code, channel, received);
    const auto g = DepthFunctionTable::correlation(labeled, received);
    const auto moments = posterior_moments(labeled, g, max_order, constraint, {});
    const auto k = uncertainty_constants(channel, received, moments.log_flow / std::numbers::ln2);
    const auto& binom = BinomialTable::instance();
    std::vector<double> out(max_order + 1, 0.0);
    for (unsigned m = 0; m <= max_order; ++m)
        for (unsigned l = 0; l <= m; ++l)
            out[m] += static_cast<double>(binom(m, l)) * std::pow(k.k1(), m - l) * std::pow(-k.k2, l) *
                      moments.moments[l];
    return out;
}

SymbolPosteriors bcjr_symbol_posteriors(const Trellis& labeled)
{
    require_valid(labeled);
    const int n = labeled.rank();
    std::vector<double> alpha(labeled.num_vertices(), 0.0);
    std::vector<double> beta(labeled.num_vertices(), 0.0);
    alpha[labeled.source()] = 1.0;
    beta[labeled.sink()] = 1.0;

    for (int i = 1; i <= n; ++i) {
        for (const Edge& e : labeled.section(i)) alpha[e.fin] += alpha[e.init] * e.lambda;
        double scale = 0.0;
        for (VertexId v : labeled.layer(i)) scale += alpha[v];
        if (!(scale > 0.0)) throw Error("zero forward flow at depth " + std::to_string(i));
        for (VertexId v : labeled.layer(i)) alpha[v] /= scale;
    }
    for (int i = n; i >= 1; --i) {
        for (const Edge& e : labeled.section(i)) beta[e.init] += e.lambda * beta[e.fin];
        double scale = 0.0;
        for (VertexId v : labeled.layer(i - 1)) scale += beta[v];
        if (!(scale > 0.0)) throw Error("zero backward flow at depth " + std::to_string(i - 1));
        for (VertexId v : labeled.layer(i - 1)) beta[v] /= scale;
    }

    SymbolPosteriors out(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) {
        auto& row = out[i - 1];
        double total = 0.0;
        for (const Edge& e : labeled.section(i)) {
            const double p = alpha[e.init] * e.lambda * beta[e.fin];
            total += p;
            auto it = std::find_if(row.begin(), row.end(), [&](const auto& entry) { return entry.first == e.clabel; });
            if (it == row.end())
                row.emplace_back(e.clabel, p);
            else
                it->second += p;
        }
        for (auto& entry : row) entry.second /= total;
    }
    return out;
}

double posterior_of(const SymbolPosteriors& posteriors, int depth, double symbol)
{
    if (depth < 1 || static_cast<std::size_t>(depth) > posteriors.size())
        throw Error("depth " + std::to_string(depth) + " out of range");
    for (const auto& [x, p] : posteriors[depth - 1])
        if (x == symbol) return p;
    return 0.0;
}

double bcjr_mean_correlation(const SymbolPosteriors& posteriors, std::span<const double> received)
{
    if (received.size() != posteriors.size()) throw Error("received word length does not match trellis rank");
    double sum = 0.0;
    for (std::size_t i = 0; i < posteriors.size(); ++i)
        for (const auto& [x, p] : posteriors[i]) sum += received[i] * x * p;
    return sum;
}

} // namespace trellis
