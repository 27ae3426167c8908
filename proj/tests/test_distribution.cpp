#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "trellis/channel.hpp"
#include "trellis/codes.hpp"
#include "trellis/distribution.hpp"
#include "trellis/errors.hpp"
#include "trellis/oracle/oracle.hpp"

using namespace trellis;
using fixtures::rel_err;

namespace {

const Lattice hard{1.0, 2};

void check_matches_oracle(const ExactDistribution& got, const oracle::Histogram& want)
{
    double total = 0.0;
    for (const auto& [u, m] : want) {
        CHECK(rel_err(got.mass_at(u), m, m) < 1e-12);
        total += m;
    }
    CHECK(rel_err(got.total(), total, total) < 1e-12);
}

} // namespace

TEST_CASE("exact distribution primitives")
{
    const auto d = ExactDistribution::dirac(hard);
    CHECK(d.total() == 1.0);
    CHECK(d.shifted(0.0).points() == d.points());
    CHECK(d.shifted(1.0).mass_at(1.0) == 1.0);
    CHECK_THROWS_AS(d.shifted(0.5), Error);

    auto coin = ExactDistribution(hard);
    coin.accumulate(d.shifted(1.0));
    coin.accumulate(d.shifted(-1.0));
    const auto two = convolve(coin, coin).normalized();
    CHECK(two.mass_at(-2) == 0.25);
    CHECK(two.mass_at(0) == 0.5);
    CHECK(two.mass_at(2) == 0.25);
    CHECK(convolve(d, coin).points() == coin.points());
    CHECK(convolve(coin.scaled(3), coin.scaled(2)).total() == 24.0);
    CHECK(convolve(coin, ExactDistribution(hard)).empty());
    CHECK_THROWS_AS(convolve(coin, ExactDistribution::dirac(Lattice{1.0, 1})), Error);

    const auto padded = coin.padded(-3, 3);
    CHECK(padded.size() == 4);
    CHECK(padded.offset() == -3.0);
    CHECK(padded.total() == coin.total());
    CHECK(ExactDistribution(hard).padded(-4, 4).size() == 5);
}

TEST_CASE("SPC(4) exact distribution")
{
    const auto t = fixtures::spc4();
    const auto g = DepthFunctionTable::from_clabels(t);
    const auto lattice = detect_lattice(t, g);
    REQUIRE(lattice);
    CHECK(lattice->unit == 1.0);
    CHECK(lattice->step_units == 2);

    const auto fwd = exact_distributions(t, g, Direction::forward);
    const auto bwd = exact_distributions(t, g, Direction::backward);
    CHECK(fwd.at[t.source()].points() == ExactDistribution::dirac(hard).points());
    const auto at_b = fwd.at[t.sink()];
    CHECK(at_b.mass_at(-4) == 1.0);
    CHECK(at_b.mass_at(0) == 6.0);
    CHECK(at_b.mass_at(4) == 1.0);
    CHECK(at_b.total() == 8.0);

    for (int cut = 0; cut <= 4; ++cut) {
        const auto theta = trellis_distribution(t, fwd, bwd, cut);
        CHECK(theta.size() == 5);
        CHECK(theta.offset() == -4.0);
        CHECK(theta.mass() == std::vector<double>{1, 0, 6, 0, 1});
    }
    CHECK(trellis_distribution(t, fwd, bwd, 0).points() == bwd.at[t.source()].padded(-4, 4).points());
}

TEST_CASE("exact distributions agree with the oracle and the moment engine")
{
    auto rng = fixtures::rng(1111);
    oracle::RandomTrellisSpec spec;
    spec.alphabet = {-1.0, 1.0, 3.0};
    for (int trial = 0; trial < 10; ++trial) {
        const auto t = oracle::random_trellis(rng, spec);
        const auto g = DepthFunctionTable::from_clabels(t);
        const auto fwd = exact_distributions(t, g, Direction::forward);
        const auto bwd = exact_distributions(t, g, Direction::backward, {4});
        for (VertexId v = 0; v < t.num_vertices(); ++v) {
            check_matches_oracle(fwd.at[v], oracle::distribution(t, g, std::nullopt, t.source(), v));
            check_matches_oracle(bwd.at[v], oracle::distribution(t, g, std::nullopt, v, t.sink()));
        }
        const auto moments = forward_numerators<RealSemiring>(t, g, 4);
        for (int cut = 0; cut <= t.rank(); ++cut) {
            const auto theta = trellis_distribution(t, fwd, bwd, cut);
            for (unsigned m = 0; m <= 4; ++m) {
                const auto o = oracle::real_moment(t, g, m);
                CHECK(rel_err(theta.moment(m), moments.at(t.sink(), m), o.magnitude) < 1e-9);
            }
        }
        for (int i = 1; i <= t.rank(); ++i) {
            ExactDistribution sum(fwd.lattice);
            for (double x : spec.alphabet) {
                const auto omega = symbol_distribution(t, g, fwd, bwd, i, x);
                check_matches_oracle(omega, oracle::distribution(t, g, oracle::Constraint{i, x}));
                sum.accumulate(omega);
            }
            const auto theta = trellis_distribution(t, fwd, bwd, i);
            for (const auto& [u, m] : theta.points()) CHECK(rel_err(sum.mass_at(u), m, theta.total()) < 1e-12);
        }
    }
}

TEST_CASE("lattice detection")
{
    auto rng = fixtures::rng(1212);
    const auto t = fixtures::spc4();
    CHECK_FALSE(detect_lattice(t, oracle::random_depth_function(rng, t, -1, 1)).has_value());
    const auto half = detect_lattice(t, DepthFunctionTable::correlation(t, std::vector<double>{0.5, 0.5, 1.5, 0.5}));
    REQUIRE(half);
    CHECK(half->unit == doctest::Approx(0.5));
    CHECK(detect_lattice(t, DepthFunctionTable::zeros(t)).has_value());
    CHECK_THROWS_AS(exact_distributions(t, oracle::random_depth_function(rng, t, -1, 1), Direction::forward), Error);
}

TEST_CASE("redistribute")
{
    auto d = QuantizedDistribution::zero(3, 0.5, 1.0);
    d.mass = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7};

    const auto same = redistribute(d, 0.0);
    CHECK(same.mass == d.mass);
    CHECK(same.center == d.center);

    const auto one = redistribute(d, 0.5);
    CHECK(one.center == 1.5);
    const std::vector<double> expect{0.1 + 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.0};
    for (std::size_t k = 0; k < expect.size(); ++k) CHECK(one.mass[k] == doctest::Approx(expect[k]));

    const auto back = redistribute(d, -0.5);
    CHECK(back.mass.front() == 0.0);
    CHECK(back.mass.back() == doctest::Approx(0.6 + 0.7));

    const auto quarter = redistribute(d, 0.25);
    CHECK(quarter.total() == doctest::Approx(d.total()));
    CHECK(quarter.moment(1) == doctest::Approx(d.moment(1)).epsilon(0.05));

    const auto wide = redistribute(d, 0.0, 5);
    CHECK(wide.mass.size() == 11);
    CHECK(wide.mass[1] == 0.0);
    CHECK(wide.mass[2] == 0.1);
    CHECK(wide.mass[8] == 0.7);

    const auto narrow = redistribute(d, 0.0, 1);
    REQUIRE(narrow.mass.size() == 3);
    CHECK(narrow.mass[0] == doctest::Approx(0.6));
    CHECK(narrow.mass[1] == 0.4);
    CHECK(narrow.mass[2] == doctest::Approx(1.8));
}

TEST_CASE("redistribute conserves mass and tracks interior means")
{
    auto rng = fixtures::rng(1313);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> bins(1, 40);
    for (int trial = 0; trial < 2000; ++trial) {
        const int n = bins(rng);
        const double width = 0.1 + unit(rng);
        auto d = QuantizedDistribution::zero(n, width, 10 * unit(rng) - 5);
        const int lo = n / 2;
        for (int k = -lo / 2; k <= lo / 2; ++k) d.mass[static_cast<std::size_t>(n + k)] = unit(rng);
        const double dmu = (unit(rng) - 0.5) * n * width / 2;
        const auto out = redistribute(d, dmu);
        CHECK(rel_err(out.total(), d.total(), d.total()) < 1e-12);
        if (d.total() > 0) CHECK(std::abs(out.moment(1) / out.total() - d.moment(1) / d.total()) <= width);
    }
}

TEST_CASE("quantized lengthening moves only the mean")
{
    auto d = QuantizedDistribution::dirac(4, 1.0, 3.2);
    d.mass[2] = 0.5;
    const auto s = d.shifted(0.7);
    CHECK(s.center == doctest::Approx(3.9));
    CHECK(s.mass == d.mass);
}

TEST_CASE("quantized convolution")
{
    auto a = QuantizedDistribution::dirac(2, 1.0, 1.0);
    auto b = QuantizedDistribution::dirac(3, 1.0, -2.0);
    b.mass[4] = 1.0;
    const auto c = convolve(a, b);
    CHECK(c.half_bins() == 5);
    CHECK(c.center == -1.0);
    CHECK(c.total() == 2.0);
    CHECK(c.mass[5] == 1.0);
    CHECK(c.mass[6] == 1.0);
    CHECK_THROWS_AS(convolve(a, QuantizedDistribution::dirac(2, 0.5)), Error);
}

TEST_CASE("quantized pipeline on the hard-decision SPC example")
{
    const auto t = fixtures::spc4();
    const auto g = DepthFunctionTable::from_clabels(t);
    const auto exact_f = exact_distributions(t, g, Direction::forward);
    const auto exact_b = exact_distributions(t, g, Direction::backward);
    const auto theta = trellis_distribution(t, exact_f, exact_b, 4);

    QuantizationParams params{4, 2.0, Anchor::lattice};
    const auto qf = quantized_distributions(t, g, Direction::forward, params);
    const auto qb = quantized_distributions(t, g, Direction::backward, params);
    for (int cut = 0; cut <= 4; ++cut) {
        const auto q = trellis_distribution(t, qf, qb, cut);
        for (const auto& [u, m] : q.points()) CHECK(m == doctest::Approx(theta.mass_at(u)).epsilon(1e-12));
        CHECK(q.total() == doctest::Approx(8.0));
    }
    CHECK(qf.mean[t.sink()] == doctest::Approx(0.0));
}

TEST_CASE("quantized means and masses follow the exact flow")
{
    auto rng = fixtures::rng(1414);
    for (int trial = 0; trial < 5; ++trial) {
        const auto t = oracle::random_trellis(rng);
        const auto g = oracle::random_depth_function(rng, t, -1.0, 1.0);
        const auto params = default_quantization(t, g);
        CHECK(params.half_bins == 32);
        const auto qf = quantized_distributions(t, g, Direction::forward, params);
        const auto qb = quantized_distributions(t, g, Direction::backward, params);
        const auto fwd = forward_numerators<RealSemiring>(t, g, 1);
        for (VertexId v = 0; v < t.num_vertices(); ++v) {
            CHECK(rel_err(qf.at[v].total(), fwd.at(v, 0), fwd.at(v, 0)) < 1e-12);
            CHECK(qf.mean[v] == doctest::Approx(fwd.at(v, 1) / fwd.at(v, 0)).epsilon(1e-9));
        }
        const auto theta = trellis_distribution(t, qf, qb, t.rank() / 2);
        CHECK(rel_err(theta.total(), fwd.at(t.sink(), 0), fwd.at(t.sink(), 0)) < 1e-12);
        for (int i = 1; i <= t.rank(); ++i) {
            double sum = 0.0;
            for (double x : {-1.0, 1.0}) sum += symbol_distribution(t, g, qf, qb, i, x).total();
            CHECK(rel_err(sum, theta.total(), theta.total()) < 1e-12);
        }
    }
}

TEST_CASE("quantized mode rejects zero incoming weight")
{
    TrellisBuilder b(2);
    const auto a = b.add_vertex(0);
    const auto m = b.add_vertex(1);
    const auto z = b.add_vertex(2);
    b.add_edge(a, m, 0.0, 1);
    b.add_edge(m, z, 1.0, 1);
    const auto t = b.build();
    try {
        quantized_distributions(t, DepthFunctionTable::from_clabels(t), Direction::forward, {});
        FAIL("expected an error");
    } catch (const Error& err) {
        CHECK(std::string(err.what()).find("vertex 1") != std::string::npos);
    }
}

TEST_CASE("symbol distributions integrate to BCJR symbol probabilities")
{
    const auto t = fixtures::spc4();
    const auto channel = ChannelModel::bsc(0.35);
    const std::vector<double> r{1, -1, -1, -1};
    const auto labeled = channel_lambda_labels(t, channel, r);
    const auto g = DepthFunctionTable::correlation(labeled, r);
    const auto fwd = exact_distributions(labeled, g, Direction::forward);
    const auto bwd = exact_distributions(labeled, g, Direction::backward);
    const double flow = trellis_distribution(labeled, fwd, bwd, 2).total();
    const auto words = oracle::codewords(t);
    for (int i = 1; i <= 4; ++i)
        for (double x : {-1.0, 1.0}) {
            const double p = symbol_distribution(labeled, g, fwd, bwd, i, x).total() / flow;
            CHECK(p == doctest::Approx(oracle::symbol_probability(words, channel, r, i, x)).epsilon(1e-12));
        }
    CHECK(trellis_distribution(labeled, fwd, bwd, 2).normalized().total() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(symbol_distribution(labeled, g, fwd, bwd, 2, 0.0).total() == 0.0);
}

TEST_CASE("hard-decision quantized pipeline reproduces [7 5] distributions")
{
    const auto code = parse_generators("7,5");
    for (int k = 1; k <= 6; ++k)
        for (bool terminated : {true, false}) {
            const auto t = build_conv_trellis(code, k, terminated);
            const auto g = DepthFunctionTable::from_clabels(t);
            const auto ef = exact_distributions(t, g, Direction::forward);
            const auto eb = exact_distributions(t, g, Direction::backward);
            const QuantizationParams params{(t.rank() + 1) / 2, 2.0, Anchor::lattice};
            const auto qf = quantized_distributions(t, g, Direction::forward, params);
            const auto qb = quantized_distributions(t, g, Direction::backward, params);
            for (int cut = 0; cut <= t.rank(); ++cut) {
                const auto exact = trellis_distribution(t, ef, eb, cut);
                const auto q = trellis_distribution(t, qf, qb, cut);
                for (const auto& [u, m] : q.points()) CHECK(m == exact.mass_at(u));
                CHECK(q.total() == exact.total());
            }
            for (int i = 1; i <= t.rank(); ++i)
                for (double x : {-1.0, 1.0}) {
                    const auto exact = symbol_distribution(t, g, ef, eb, i, x);
                    for (const auto& [u, m] : symbol_distribution(t, g, qf, qb, i, x).points())
                        CHECK(m == exact.mass_at(u));
                }
        }
}
