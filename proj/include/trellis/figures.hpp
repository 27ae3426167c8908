#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "trellis/channel.hpp"
#include "trellis/trellis.hpp"

namespace trellis {

/// Setup shared by both figure datasets: a terminated convolutional code, a
/// seeded transmitted codeword and a BSC draw.
struct FigureConfig {
    std::string generators = "5,7";
    int info_len = 98;
    double crossover = 0.35;
    int depth = 10;
    std::uint64_t seed = 1;
    int threads = 1;
};

/// Row of a distribution CSV: domain value, raw mass, mass / flow and the
/// step-scaled Gaussian density with matched mean and variance.
struct DistributionRow {
    double value = 0.0;
    double mass = 0.0;
    double normalized_mass = 0.0;
    double gaussian_approx = 0.0;
};

std::vector<DistributionRow> distribution_rows(const std::vector<std::pair<double, double>>& points, double flow,
                                               double mean, double variance, double step);

/// Total variation distance between normalized masses and the Gaussian
/// column, counting Gaussian mass outside the listed points.
double total_variation(const std::vector<DistributionRow>& rows);

void write_distribution_csv(std::ostream& out, const std::vector<DistributionRow>& rows);

/// P(c r^T = u, c_i = +1 | r) and P(c r^T = u, c_i = -1 | r).
struct SymbolFigure {
    struct Row {
        double value;
        double plus;
        double minus;
        double ratio; // plus / minus; inf or nan where minus vanishes
    };
    std::vector<Row> rows;
    double sum_plus = 0.0;
    double sum_minus = 0.0;
    double bcjr_plus = 0.0;
    double bcjr_minus = 0.0;
    double ratio_min = 0.0; // over rows where both curves are positive
    double ratio_max = 0.0;
    int rank = 0;
    int depth = 0;
    std::string channel;
};

struct TrellisFigure {
    std::vector<DistributionRow> rows;
    double mean = 0.0;
    double variance = 0.0;
    double tv_distance = 0.0;
    int rank = 0;
    std::string channel;
};

Transmission figure_transmission(const Trellis& code, const FigureConfig& config);
SymbolFigure symbol_figure(const FigureConfig& config);
TrellisFigure trellis_figure(const FigureConfig& config);

void write_symbol_figure_csv(std::ostream& out, const SymbolFigure& figure);

} // namespace trellis
