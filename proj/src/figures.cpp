#include "trellis/figures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "trellis/analysis.hpp"
#include "trellis/codes.hpp"
#include "trellis/distribution.hpp"
#include "trellis/errors.hpp"
#include "trellis/trellis_io.hpp"

namespace trellis {

std::vector<DistributionRow> distribution_rows(const std::vector<std::pair<double, double>>& points, double flow,
                                               double mean, double variance, double step)
{
    std::vector<DistributionRow> rows;
    rows.reserve(points.size());
    const double sd = std::sqrt(std::max(variance, 0.0));
    for (const auto& [u, mass] : points) {
        DistributionRow row{u, mass, flow != 0.0 ? mass / flow : 0.0, 0.0};
        if (sd > 0.0) {
            const double z = (u - mean) / sd;
            row.gaussian_approx = step * std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
        } else {
            row.gaussian_approx = std::abs(u - mean) < 0.5 * step ? 1.0 : 0.0;
        }
        rows.push_back(row);
    }
    return rows;
}

double total_variation(const std::vector<DistributionRow>& rows)
{
    double diff = 0.0;
    double gauss = 0.0;
    for (const auto& row : rows) {
        diff += std::abs(row.normalized_mass - row.gaussian_approx);
        gauss += row.gaussian_approx;
    }
    return 0.5 * (diff + std::max(0.0, 1.0 - gauss));
}

void write_distribution_csv(std::ostream& out, const std::vector<DistributionRow>& rows)
{
    out << "domain_value,mass,normalized_mass,gaussian_approx\n";
    for (const auto& row : rows)
        out << format_real(row.value) << ',' << format_real(row.mass) << ',' << format_real(row.normalized_mass) << ','
            << format_real(row.gaussian_approx) << '\n';
}

namespace {

Trellis figure_code(const FigureConfig& config)
{
    return build_conv_trellis(parse_generators(config.generators), config.info_len, true);
}

} // namespace

Transmission figure_transmission(const Trellis& code, const FigureConfig& config)
{
    return simulate_transmission(code, ChannelModel::bsc(config.crossover), config.seed);
}

SymbolFigure symbol_figure(const FigureConfig& config)
{
    const Trellis code = figure_code(config);
    const auto channel = ChannelModel::bsc(config.crossover);
    const auto tx = figure_transmission(code, config);
    const Trellis labeled = channel_lambda_labels(code, channel, tx.received);
    const auto g = DepthFunctionTable::correlation(labeled, tx.received);
    const RunOptions options{config.threads};

    const auto forward = exact_distributions(labeled, g, Direction::forward, options);
    const auto backward = exact_distributions(labeled, g, Direction::backward, options);
    const double flow = trellis_distribution(labeled, forward, backward, 0).total();
    const auto plus = symbol_distribution(labeled, g, forward, backward, config.depth, 1.0);
    const auto minus = symbol_distribution(labeled, g, forward, backward, config.depth, -1.0);
    const auto posteriors = bcjr_symbol_posteriors(labeled);

    SymbolFigure fig;
    fig.rank = labeled.rank();
    fig.depth = config.depth;
    fig.channel = channel.to_string();
    fig.bcjr_plus = posterior_of(posteriors, config.depth, 1.0);
    fig.bcjr_minus = posterior_of(posteriors, config.depth, -1.0);
    fig.ratio_min = std::numeric_limits<double>::infinity();
    fig.ratio_max = -fig.ratio_min;
    for (std::size_t k = 0; k < plus.size(); ++k) {
        const double u = plus.value(k);
        const double p = plus.mass()[k] / flow;
        const double m = minus.mass_at(u) / flow;
        const double ratio = m != 0.0 ? p / m : (p != 0.0 ? std::numeric_limits<double>::infinity()
                                                          : std::numeric_limits<double>::quiet_NaN());
        fig.rows.push_back({u, p, m, ratio});
        fig.sum_plus += p;
        fig.sum_minus += m;
        if (p > 0.0 && m > 0.0) {
            fig.ratio_min = std::min(fig.ratio_min, ratio);
            fig.ratio_max = std::max(fig.ratio_max, ratio);
        }
    }
    return fig;
}

TrellisFigure trellis_figure(const FigureConfig& config)
{
    const Trellis code = figure_code(config);
    const auto channel = ChannelModel::bsc(config.crossover);
    const auto tx = figure_transmission(code, config);
    const Trellis labeled = channel_lambda_labels(code, channel, tx.received);
    const auto g = DepthFunctionTable::correlation(labeled, tx.received);
    const RunOptions options{config.threads};

    const auto forward = exact_distributions(labeled, g, Direction::forward, options);
    const auto backward = exact_distributions(labeled, g, Direction::backward, options);
    const auto dist = trellis_distribution(labeled, forward, backward, labeled.rank());
    const auto moments = normalized_trellis_moments(labeled, normalized_states(labeled, g, 2, Direction::forward, options));

    TrellisFigure fig;
    fig.rank = labeled.rank();
    fig.channel = channel.to_string();
    fig.mean = moments.moments[1];
    fig.variance = moments.moments[2] - fig.mean * fig.mean;
    fig.rows = distribution_rows(dist.points(), dist.total(), fig.mean, fig.variance, dist.step());
    fig.tv_distance = total_variation(fig.rows);
    return fig;
}

void write_symbol_figure_csv(std::ostream& out, const SymbolFigure& figure)
{
    out << "domain_value,plus,minus,ratio\n";
    for (const auto& row : figure.rows)
        out << format_real(row.value) << ',' << format_real(row.plus) << ',' << format_real(row.minus) << ','
            << format_real(row.ratio) << '\n';
}

} // namespace trellis
