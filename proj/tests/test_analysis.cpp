#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>

#include "fixtures.hpp"
#include "trellis/analysis.hpp"
#include "trellis/channel.hpp"
#include "trellis/codes.hpp"
#include "trellis/errors.hpp"
#include "trellis/oracle/oracle.hpp"

using namespace trellis;
using fixtures::rel_err;

namespace {

const std::vector<double> r4{1, -1, -1, -1};

std::vector<std::pair<int, double>> all_subcodes(int n)
{
    std::vector<std::pair<int, double>> out;
    for (int i = 1; i <= n; ++i)
        for (double x : {1.0, -1.0}) out.emplace_back(i, x);
    return out;
}

} // namespace

TEST_CASE("oracle entropy sanity")
{
    const auto bsc = ChannelModel::bsc(0.35);
    const auto words = oracle::codewords(fixtures::spc4());
    const std::vector<double> zero{0, 0, 0, 0};
    CHECK(oracle::posterior_entropy(words, ChannelModel::awgn(1.0), zero) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(oracle::posterior_entropy({words.front()}, bsc, r4) == 0.0);
}

TEST_CASE("path cap override")
{
    const auto t = build_spc_trellis(8);
    setenv("TRELLIS_PATH_CAP", "64", 1);
    CHECK(oracle::path_cap() == 64);
    CHECK_THROWS_AS(oracle::codewords(t), PathCapExceeded);
    setenv("TRELLIS_PATH_CAP", "128", 1);
    CHECK(oracle::codewords(t).size() == 128);
    setenv("TRELLIS_PATH_CAP", "zero", 1);
    CHECK_THROWS_AS(oracle::path_cap(), Error);
    unsetenv("TRELLIS_PATH_CAP");
    CHECK(oracle::path_cap() == 16384);
}

TEST_CASE("SPC(4) over BSC(0.35): entropy of the code and of every subcode")
{
    const auto t = fixtures::spc4();
    const auto bsc = ChannelModel::bsc(0.35);
    const auto words = oracle::codewords(t);
    const auto full = conditional_entropy(t, bsc, r4);
    CHECK(rel_err(full.entropy, oracle::posterior_entropy(words, bsc, r4), 1.0) < 1e-9);
    CHECK(full.entropy > 0.0);
    CHECK(full.entropy < 3.0);
    for (const auto& [i, x] : all_subcodes(4)) {
        const auto sub = conditional_entropy(t, bsc, r4, SymbolConstraint{i, x});
        CHECK(rel_err(sub.entropy, oracle::posterior_entropy(words, bsc, r4, oracle::Constraint{i, x}), 1.0) < 1e-9);
    }
}

TEST_CASE("entropy on random received words and channels")
{
    auto rng = fixtures::rng(2020);
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto t = build_conv_trellis(parse_generators("7,5"), 4, true);
    const auto words = oracle::codewords(t);
    for (int trial = 0; trial < 5; ++trial) {
        for (const auto& channel : {ChannelModel::bsc(0.1 + 0.05 * trial), ChannelModel::awgn(0.3 + 0.2 * trial)}) {
            const auto tx = simulate_transmission(t, channel, rng());
            const auto& r = tx.received;
            const double want = oracle::posterior_entropy(words, channel, r);
            CHECK(rel_err(conditional_entropy(t, channel, r).entropy, want, 1.0) < 1e-9);
            for (int i : {1, 5, t.rank()})
                for (double x : {1.0, -1.0}) {
                    const auto sub = conditional_entropy(t, channel, r, SymbolConstraint{i, x});
                    CHECK(rel_err(sub.entropy, oracle::posterior_entropy(words, channel, r, oracle::Constraint{i, x}),
                                  1.0) < 1e-9);
                }
        }
    }
}

TEST_CASE("correlation moments match codeword sums")
{
    const auto t = fixtures::spc4();
    const auto bsc = ChannelModel::bsc(0.35);
    const auto words = oracle::codewords(t);
    CHECK(words.size() == 8);
    const std::vector<double> w{0.3, -1.2, 2.0, 0.7};
    for (const auto& word : {r4, w}) {
        const auto got = correlation_moments(t, bsc, r4, word, 2);
        for (unsigned m = 0; m <= 2; ++m) {
            const double want = oracle::correlation_moment(words, bsc, r4, word, m);
            CHECK(rel_err(got[m], want, 1.0) < 1e-9);
        }
        for (const auto& [i, x] : all_subcodes(4)) {
            const auto sub = correlation_moments(t, bsc, r4, word, 2, SymbolConstraint{i, x});
            for (unsigned m = 0; m <= 2; ++m)
                CHECK(rel_err(sub[m], oracle::correlation_moment(words, bsc, r4, word, m, oracle::Constraint{i, x}),
                              1.0) < 1e-9);
        }
    }
    const auto zero = correlation_moments(t, bsc, r4, std::vector<double>{0, 0, 0, 0}, 3);
    CHECK(zero == std::vector<double>{1, 0, 0, 0});
}

TEST_CASE("entropy in the low-noise limit")
{
    const auto t = fixtures::spc4();
    const std::vector<double> r{1, 1, -1, -1};
    CHECK(conditional_entropy(t, ChannelModel::bsc(1e-9), r).entropy == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(conditional_entropy(t, ChannelModel::bsc(1e-9), r4).entropy ==
          doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("BCJR posteriors and the first correlation moment")
{
    auto rng = fixtures::rng(3030);
    const auto t = build_conv_trellis(parse_generators("5,7"), 6, true);
    const auto words = oracle::codewords(t);
    for (int trial = 0; trial < 4; ++trial) {
        const auto channel = trial % 2 ? ChannelModel::awgn(0.8) : ChannelModel::bsc(0.3);
        const auto tx = simulate_transmission(t, channel, rng());
        const auto labeled = channel_lambda_labels(t, channel, tx.received);
        const auto posteriors = bcjr_symbol_posteriors(labeled);
        for (int i = 1; i <= t.rank(); ++i)
            for (double x : {1.0, -1.0})
                CHECK(posterior_of(posteriors, i, x) ==
                      doctest::Approx(oracle::symbol_probability(words, channel, tx.received, i, x)).epsilon(1e-12));
        const auto m = correlation_moments(t, channel, tx.received, tx.received, 1);
        CHECK(rel_err(bcjr_mean_correlation(posteriors, tx.received), m[1], 1.0) < 1e-9);
    }
    CHECK_THROWS_AS(posterior_of(SymbolPosteriors(3), 4, 1.0), Error);
}

TEST_CASE("uncertainty moments")
{
    const auto t = fixtures::spc4();
    const auto bsc = ChannelModel::bsc(0.35);
    const auto words = oracle::codewords(t);
    const auto moments = uncertainty_moments(t, bsc, r4, 3);
    CHECK(moments[0] == doctest::Approx(1.0));
    CHECK(rel_err(moments[1], oracle::posterior_entropy(words, bsc, r4), 1.0) < 1e-9);

    // Direct posterior-weighted sums of (-log2 P(c|r))^m.
    std::vector<double> post;
    double total = 0.0;
    for (const auto& c : words) total += post.emplace_back(oracle::likelihood(bsc, c, r4));
    for (unsigned m = 0; m <= 3; ++m) {
        double want = 0.0;
        for (double p : post) want += p / total * std::pow(-std::log2(p / total), m);
        CHECK(rel_err(moments[m], want, 1.0) < 1e-9);
    }
    const auto sub = uncertainty_moments(t, bsc, r4, 1, SymbolConstraint{2, 1.0});
    CHECK(rel_err(sub[1], oracle::posterior_entropy(words, bsc, r4, oracle::Constraint{2, 1.0}), 1.0) < 1e-9);
}

TEST_CASE("conditional uncertainty is affine in the correlation")
{
    auto rng = fixtures::rng(4040);
    std::uniform_int_distribution<int> bit(0, 1);
    std::uniform_int_distribution<int> len(1, 12);
    std::normal_distribution<double> normal(0.0, 1.5);
    for (const auto& channel : {ChannelModel::bsc(0.2), ChannelModel::awgn(0.6)}) {
        int plus_ok = 0;
        int minus_ok = 0;
        for (int trial = 0; trial < 100; ++trial) {
            const auto n = static_cast<std::size_t>(len(rng));
            std::vector<double> c(n), w(n);
            for (std::size_t i = 0; i < n; ++i) {
                c[i] = bipolar(static_cast<unsigned>(bit(rng)));
                w[i] = channel.kind() == ChannelModel::Kind::bsc ? bipolar(static_cast<unsigned>(bit(rng))) : normal(rng);
            }
            // Uniform prior over all 2^n bipolar words.
            double log2_pw = 0.0;
            for (double wi : w) log2_pw += std::log2(0.5 * (channel.likelihood(wi, 1) + channel.likelihood(wi, -1)));
            const double log2_pc = -static_cast<double>(n);
            const double direct = -(std::log2(oracle::likelihood(channel, c, w)) + log2_pc - log2_pw);
            double corr = 0.0;
            for (std::size_t i = 0; i < n; ++i) corr += c[i] * w[i];
            const auto k = uncertainty_constants(channel, w, log2_pw - log2_pc);
            minus_ok += std::abs(k.k1() - k.k2 * corr - direct) <= 1e-9 * std::max(1.0, std::abs(direct));
            plus_ok += std::abs(k.k1() + k.k2 * corr - direct) <= 1e-9 * std::max(1.0, std::abs(direct));
        }
        MESSAGE(channel.to_string() << ": H = k1 - k2*cw^T holds on " << minus_ok << "/100, H = k1 + k2*cw^T on "
                                    << plus_ok << "/100");
        CHECK(minus_ok == 100);
        CHECK(plus_ok < 100);
    }
}

TEST_CASE("all-zero likelihoods are rejected")
{
    const auto t = fixtures::spc4();
    const auto awgn = ChannelModel::awgn(0.1);
    const std::vector<double> far{1e200, 1, 1, 1};
    CHECK_THROWS_AS(oracle::posterior_entropy(oracle::codewords(t), awgn, far), Error);
    CHECK_THROWS_AS(conditional_entropy(t, awgn, far), Error);
}
