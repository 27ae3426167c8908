#include <doctest.h>

#include <cmath>
#include <sstream>

#include "trellis/figures.hpp"

using namespace trellis;

TEST_CASE("symbol distribution figure")
{
    const auto fig = symbol_figure({});
    CHECK(fig.rank == 200);
    CHECK(fig.depth == 10);
    CHECK(fig.sum_plus == doctest::Approx(fig.bcjr_plus).epsilon(1e-9));
    CHECK(fig.sum_minus == doctest::Approx(fig.bcjr_minus).epsilon(1e-9));
    CHECK(fig.sum_plus + fig.sum_minus == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fig.ratio_max > fig.ratio_min * (1 + 1e-6));
    MESSAGE("ratio range " << fig.ratio_min << " .. " << fig.ratio_max << ", P(+) = " << fig.sum_plus);

    std::ostringstream csv;
    write_symbol_figure_csv(csv, fig);
    CHECK(csv.str().rfind("domain_value,plus,minus,ratio\n", 0) == 0);
}

TEST_CASE("trellis distribution figure")
{
    const auto fig = trellis_figure({});
    double total = 0.0;
    double mean = 0.0;
    for (const auto& row : fig.rows) {
        total += row.normalized_mass;
        mean += row.value * row.normalized_mass;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(mean == doctest::Approx(fig.mean).epsilon(1e-9));
    CHECK(fig.variance > 0.0);
    CHECK(fig.tv_distance < 0.1);
    MESSAGE("mean " << fig.mean << ", variance " << fig.variance << ", TV " << fig.tv_distance);
}

TEST_CASE("figure helpers")
{
    const auto rows = distribution_rows({{-1.0, 1.0}, {1.0, 1.0}}, 2.0, -1.0, 0.0, 2.0);
    CHECK(rows[0].normalized_mass == 0.5);
    CHECK(total_variation(rows) == doctest::Approx(0.5));
    const auto flat = distribution_rows({{0.0, 3.0}}, 3.0, 0.0, 0.0, 1.0);
    CHECK(total_variation(flat) == 0.0);
}
