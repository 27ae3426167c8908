#include <doctest.h>

#include <cmath>
#include <limits>

#include "fixtures.hpp"
#include "trellis/errors.hpp"
#include "trellis/moments.hpp"
#include "trellis/oracle/oracle.hpp"

using namespace trellis;
using fixtures::rel_err;

TEST_CASE("SPC(4) moments with g = c-label")
{
    const auto t = fixtures::spc4();
    const auto g = DepthFunctionTable::from_clabels(t);
    const auto fwd = forward_numerators<RealSemiring>(t, g, 2);
    const auto m = trellis_moments<RealSemiring>(t, fwd);
    CHECK(m.numerators == std::vector<double>{8, 0, 32});
    REQUIRE(m.normalized);
    CHECK(*m.normalized == std::vector<double>{1, 0, 4});
    CHECK(fwd.at(t.source(), 0) == 1.0);
    CHECK(fwd.at(3, 0) == 2.0);

    const auto bwd = backward_numerators<RealSemiring>(t, g, 2);
    CHECK(trellis_moments<RealSemiring>(t, bwd).numerators == std::vector<double>{8, 0, 32});
}

TEST_CASE("symbol moments on SPC(4)")
{
    const auto t = fixtures::spc4();
    const auto g = DepthFunctionTable::from_clabels(t);
    const auto fwd = forward_numerators<RealSemiring>(t, g, 2);
    const auto bwd = backward_numerators<RealSemiring>(t, g, 2);
    for (int i = 1; i <= 4; ++i) {
        const auto plus = symbol_moments<RealSemiring>(t, g, fwd, bwd, i, 1.0);
        const auto minus = symbol_moments<RealSemiring>(t, g, fwd, bwd, i, -1.0);
        for (unsigned m = 0; m <= 2; ++m) {
            CHECK(plus.numerators[m] + minus.numerators[m] == doctest::Approx(std::vector<double>{8, 0, 32}[m]));
            CHECK(plus.numerators[m] == doctest::Approx(oracle::real_moment(t, g, m, oracle::Constraint{i, 1.0}).value));
        }
        CHECK(plus.numerators[0] == 4.0);
    }
    CHECK_THROWS_AS(symbol_moments<RealSemiring>(t, g, fwd, bwd, 0, 1.0), Error);
    CHECK_THROWS_AS(symbol_moments<RealSemiring>(t, g, fwd, bwd, 5, 1.0), Error);
    const auto none = symbol_moments<RealSemiring>(t, g, fwd, bwd, 2, 0.5);
    CHECK(none.numerators[0] == 0.0);
    CHECK_FALSE(none.normalized.has_value());
}

TEST_CASE("forward and backward numerators match the oracle at every vertex")
{
    auto rng = fixtures::rng(101);
    for (int trial = 0; trial < 10; ++trial) {
        const auto t = oracle::random_trellis(rng);
        const auto g = oracle::random_depth_function(rng, t, -1.5, 2.0);
        const auto fwd = forward_numerators<RealSemiring>(t, g, 3);
        const auto bwd = backward_numerators<RealSemiring>(t, g, 3);
        for (VertexId v = 0; v < t.num_vertices(); ++v) {
            for (unsigned m = 0; m <= 3; ++m) {
                const auto head = oracle::real_moment(t, g, m, std::nullopt, t.source(), v);
                const auto tail = oracle::real_moment(t, g, m, std::nullopt, v, t.sink());
                CHECK(rel_err(fwd.at(v, m), head.value, head.magnitude) < 1e-9);
                CHECK(rel_err(bwd.at(v, m), tail.value, tail.magnitude) < 1e-9);
            }
        }
    }
}

TEST_CASE("parallel kernel equals serial reference")
{
    auto rng = fixtures::rng(202);
    oracle::RandomTrellisSpec spec;
    spec.max_rank = 12;
    spec.max_width = 16;
    spec.max_paths = std::size_t{1} << 40;
    for (int trial = 0; trial < 5; ++trial) {
        const auto t = oracle::random_trellis(rng, spec);
        const auto g = oracle::random_depth_function(rng, t, -1.0, 1.0);
        for (auto dir : {Direction::forward, Direction::backward}) {
            const auto ref = reference::numerators<RealSemiring>(t, g, 4, dir);
            for (int threads : {1, 4}) {
                const auto par = run_numerators<RealSemiring>(t, LiftedLabels<RealSemiring>(t, g, 4), dir, {threads});
                for (VertexId v = 0; v < t.num_vertices(); ++v)
                    for (unsigned m = 0; m <= 4; ++m)
                        CHECK(rel_err(par.at(v, m), ref.at(v, m), std::abs(ref.at(v, m))) < 1e-12);
            }
        }
    }
}

TEST_CASE("threaded runs are bit-identical to single-threaded runs")
{
    auto rng = fixtures::rng(303);
    oracle::RandomTrellisSpec spec;
    spec.max_rank = 10;
    spec.max_width = 32;
    spec.max_paths = std::size_t{1} << 50;
    const auto t = oracle::random_trellis(rng, spec);
    const auto g = oracle::random_depth_function(rng, t, -1.0, 1.0);
    const LiftedLabels<RealSemiring> labels(t, g, 3);
    const auto one = run_numerators<RealSemiring>(t, labels, Direction::forward, {1});
    const auto four = run_numerators<RealSemiring>(t, labels, Direction::forward, {4});
    for (VertexId v = 0; v < t.num_vertices(); ++v)
        for (unsigned m = 0; m <= 3; ++m) CHECK(one.at(v, m) == four.at(v, m));
}

TEST_CASE("joint moments match the oracle")
{
    auto rng = fixtures::rng(404);
    for (int trial = 0; trial < 5; ++trial) {
        const auto t = oracle::random_trellis(rng);
        const auto gy = oracle::random_depth_function(rng, t, -1.0, 1.0);
        const auto gz = oracle::random_depth_function(rng, t, 0.0, 2.0);
        const auto state = joint_forward_numerators<RealSemiring>(t, gy, gz, 2, 2);
        for (unsigned k = 0; k <= 2; ++k)
            for (unsigned m = 0; m <= 2; ++m) {
                const auto want = oracle::joint_moment(t, gy, gz, k, m, t.sink());
                CHECK(rel_err(state.at(t.sink(), k, m), want.value, want.magnitude) < 1e-9);
            }
        const auto norm = joint_moment(t, state, 1, 1);
        REQUIRE(norm);
        CHECK(*norm == doctest::Approx(state.at(t.sink(), 1, 1) / state.at(t.sink(), 0, 0)));
    }
}

TEST_CASE("operation counts follow the closed form")
{
    const auto t = fixtures::spc4();
    const auto g = DepthFunctionTable::from_clabels(t);
    const double e = static_cast<double>(t.num_edges());
    const double v = static_cast<double>(t.num_vertices());
    for (unsigned m = 0; m <= 4; ++m) {
        const auto run = counted_run(t, g, m);
        const double mm = m;
        const double exact = (1.5 * mm * mm + 4.5 * mm + 2) * e - (mm + 1) * (v - 1);
        CHECK(static_cast<double>(run.ops.recursion_total()) == exact);
        CHECK(run.ops.power_multiplications == t.num_edges() * (m > 1 ? m - 1 : 0));
        CHECK(run.moments.numerators == trellis_moments<RealSemiring>(t, forward_numerators<RealSemiring>(t, g, m)).numerators);
        const auto symbol = counted_symbol_pass(t, g, m);
        CHECK(static_cast<double>(symbol.multiplications) == e * (mm * mm + 3 * mm + 2));
    }
}

TEST_CASE("counting does not depend on thread count")
{
    auto rng = fixtures::rng(505);
    const auto t = oracle::random_trellis(rng);
    const auto g = oracle::random_depth_function(rng, t, -1.0, 1.0);
    const auto a = counted_run(t, g, 3, {1});
    const auto b = counted_run(t, g, 3, {4});
    CHECK(a.ops.multiplications == b.ops.multiplications);
    CHECK(a.ops.additions == b.ops.additions);
}

TEST_CASE("tropical M = 0 is Viterbi")
{
    auto rng = fixtures::rng(606);
    std::uniform_real_distribution<double> metric(0.0, 10.0);
    for (int trial = 0; trial < 5; ++trial) {
        const auto t = oracle::random_trellis(rng);
        std::vector<double> lambda(t.num_edges());
        for (double& x : lambda) x = metric(rng);
        const std::vector<double> zeros(t.num_edges(), TropicalSemiring::zero());
        const LiftedLabels<TropicalSemiring> labels(lambda, zeros, 0);
        const auto state = run_numerators<TropicalSemiring>(t, labels, Direction::forward);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& path : enumerate_paths(t, t.source(), t.sink())) {
            double sum = 0.0;
            for (EdgeId e : path) sum += lambda[e];
            best = std::min(best, sum);
        }
        CHECK(state.at(t.sink(), 0) == doctest::Approx(best).epsilon(1e-12));
        CHECK(state.at(t.sink(), 0) == oracle::moment<TropicalSemiring>(t, lambda, zeros, 0, std::nullopt, t.source(), t.sink()));
    }
}

TEST_CASE("other semirings agree with their oracles")
{
    auto rng = fixtures::rng(707);
    for (int trial = 0; trial < 5; ++trial) {
        const auto t = oracle::random_trellis(rng);
        const auto g = oracle::random_depth_function(rng, t, 0.1, 2.0);
        for (unsigned m = 0; m <= 2; ++m) {
            const auto maxprod = forward_numerators<MaxProductSemiring>(t, g, m).at(t.sink(), m);
            CHECK(maxprod == doctest::Approx(oracle::moment<MaxProductSemiring>(t, g, m)).epsilon(1e-12));
            const auto tropical = forward_numerators<TropicalSemiring>(t, g, m).at(t.sink(), m);
            CHECK(tropical == doctest::Approx(oracle::moment<TropicalSemiring>(t, g, m)).epsilon(1e-12));
            const auto logreal = forward_numerators<LogRealSemiring>(t, g, m).at(t.sink(), m);
            CHECK(logreal == doctest::Approx(oracle::moment<LogRealSemiring>(t, g, m)).epsilon(1e-12));
            CHECK(forward_numerators<BooleanSemiring>(t, g, m).at(t.sink(), m) ==
                  oracle::moment<BooleanSemiring>(t, g, m));
        }
    }
}

TEST_CASE("log-domain moments equal real moments")
{
    auto rng = fixtures::rng(808);
    const auto t = oracle::random_trellis(rng);
    const auto g = oracle::random_depth_function(rng, t, 0.0, 1.0);
    const auto real = trellis_moments<RealSemiring>(t, forward_numerators<RealSemiring>(t, g, 3));
    const auto logr = trellis_moments<LogRealSemiring>(t, forward_numerators<LogRealSemiring>(t, g, 3));
    REQUIRE(logr.normalized);
    for (unsigned m = 0; m <= 3; ++m) CHECK((*logr.normalized)[m] == doctest::Approx((*real.normalized)[m]).epsilon(1e-12));
}

TEST_CASE("non-real semirings refuse negative g")
{
    const auto t = fixtures::spc4();
    const auto g = DepthFunctionTable::from_clabels(t);
    CHECK_THROWS_AS(forward_numerators<TropicalSemiring>(t, g, 1), Error);
    CHECK_NOTHROW(forward_numerators<TropicalSemiring>(t, g, 0));
}

TEST_CASE("normalized recursion survives underflow")
{
    const int n = 10;
    TrellisBuilder b(n);
    VertexId prev = b.add_vertex(0);
    for (int i = 1; i <= n; ++i) {
        const VertexId v = b.add_vertex(i);
        b.add_edge(prev, v, 1e-300, 1.0);
        b.add_edge(prev, v, 1e-300, -1.0);
        prev = v;
    }
    const auto t = b.build();
    const auto g = DepthFunctionTable::from_clabels(t);
    const auto raw = trellis_moments<RealSemiring>(t, forward_numerators<RealSemiring>(t, g, 2));
    CHECK(raw.numerators[0] == 0.0);
    CHECK_FALSE(raw.normalized.has_value());

    const auto state = normalized_states(t, g, 2, Direction::forward);
    const auto norm = normalized_trellis_moments(t, state);
    CHECK(norm.log_flow == doctest::Approx(n * std::log(2e-300)));
    CHECK(norm.moments[1] == doctest::Approx(0.0));
    CHECK(norm.moments[2] == doctest::Approx(10.0));
}

TEST_CASE("normalized symbol moments match unnormalized ratios")
{
    auto rng = fixtures::rng(909);
    for (int trial = 0; trial < 5; ++trial) {
        const auto t = oracle::random_trellis(rng);
        const auto g = oracle::random_depth_function(rng, t, -1.0, 1.0);
        const auto fwd = forward_numerators<RealSemiring>(t, g, 3);
        const auto bwd = backward_numerators<RealSemiring>(t, g, 3);
        const auto nf = normalized_states(t, g, 3, Direction::forward);
        const auto nb = normalized_states(t, g, 3, Direction::backward);
        for (int i = 1; i <= t.rank(); ++i)
            for (double x : symbols_at_depth(t, i)) {
                const auto a = symbol_moments<RealSemiring>(t, g, fwd, bwd, i, x);
                const auto b = normalized_symbol_moments(t, g, nf, nb, i, x);
                CHECK(std::exp(b.log_flow) == doctest::Approx(a.numerators[0]).epsilon(1e-12));
                for (unsigned m = 0; m <= 3; ++m)
                    CHECK(rel_err(b.moments[m], (*a.normalized)[m], 1.0) < 1e-9);
            }
    }
}

TEST_CASE("moment order limits")
{
    const auto t = fixtures::spc4();
    const auto g = DepthFunctionTable::from_clabels(t);
    CHECK_THROWS_AS(forward_numerators<RealSemiring>(t, g, 65), Error);
    CHECK_THROWS_AS(forward_numerators<RealSemiring>(t, DepthFunctionTable(std::vector<double>(3, 0.0)), 1), Error);
}
