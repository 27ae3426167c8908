#include "trellis/oracle/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <tuple>

#include "trellis/errors.hpp"

namespace trellis::oracle {

std::size_t path_cap()
{
    if (const char* env = std::getenv("TRELLIS_PATH_CAP")) {
        char* end = nullptr;
        const auto value = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && value > 0) return static_cast<std::size_t>(value);
        throw Error("TRELLIS_PATH_CAP must be a positive integer, got '" + std::string(env) + "'");
    }
    return std::size_t{1} << 14;
}

bool satisfies(const Trellis& trellis, const Path& path, const Constraint& constraint)
{
    for (EdgeId id : path) {
        const Edge& e = trellis.edge(id);
        if (trellis.depth(e.fin) == constraint.depth) return e.clabel == constraint.symbol;
    }
    return false;
}

namespace {

double path_sum(const Path& path, const DepthFunctionTable& g)
{
    double f = 0.0;
    for (EdgeId e : path) f += g[e];
    return f;
}

double path_weight(const Trellis& trellis, const Path& path)
{
    double w = 1.0;
    for (EdgeId e : path) w *= trellis.edge(e).lambda;
    return w;
}

std::vector<double> posteriors(const std::vector<std::vector<double>>& words, const ChannelModel& channel,
                               std::span<const double> received, std::optional<Constraint> constraint)
{
    std::vector<double> p(words.size(), 0.0);
    double total = 0.0;
    for (std::size_t k = 0; k < words.size(); ++k) {
        if (constraint) {
            const auto i = static_cast<std::size_t>(constraint->depth);
            if (i < 1 || i > words[k].size() || words[k][i - 1] != constraint->symbol) continue;
        }
        p[k] = likelihood(channel, words[k], received);
        total += p[k];
    }
    if (!(total > 0.0)) throw Error("all codeword likelihoods are zero");
    for (double& x : p) x /= total;
    return p;
}

} // namespace

RealSum real_moment(const Trellis& trellis, const DepthFunctionTable& g, unsigned m,
                    std::optional<Constraint> constraint)
{
    return real_moment(trellis, g, m, constraint, trellis.source(), trellis.sink());
}

RealSum real_moment(const Trellis& trellis, const DepthFunctionTable& g, unsigned m,
                    std::optional<Constraint> constraint, VertexId from, VertexId to)
{
    RealSum sum;
    for (const Path& path : enumerate_paths(trellis, from, to, path_cap())) {
        if (constraint && !satisfies(trellis, path, *constraint)) continue;
        const double term = path_weight(trellis, path) * std::pow(path_sum(path, g), static_cast<double>(m));
        sum.value += term;
        sum.magnitude += std::abs(term);
        ++sum.paths;
    }
    return sum;
}

RealSum joint_moment(const Trellis& trellis, const DepthFunctionTable& gy, const DepthFunctionTable& gz, unsigned k,
                     unsigned m, VertexId to)
{
    RealSum sum;
    for (const Path& path : enumerate_paths(trellis, trellis.source(), to, path_cap())) {
        const double term = path_weight(trellis, path) * std::pow(path_sum(path, gy), static_cast<double>(k)) *
                            std::pow(path_sum(path, gz), static_cast<double>(m));
        sum.value += term;
        sum.magnitude += std::abs(term);
        ++sum.paths;
    }
    return sum;
}

Histogram distribution(const Trellis& trellis, const DepthFunctionTable& g, std::optional<Constraint> constraint)
{
    return distribution(trellis, g, constraint, trellis.source(), trellis.sink());
}

Histogram distribution(const Trellis& trellis, const DepthFunctionTable& g, std::optional<Constraint> constraint,
                       VertexId from, VertexId to)
{
    Histogram raw;
    for (const Path& path : enumerate_paths(trellis, from, to, path_cap())) {
        if (constraint && !satisfies(trellis, path, *constraint)) continue;
        raw.emplace_back(path_sum(path, g), path_weight(trellis, path));
    }
    std::sort(raw.begin(), raw.end());
    Histogram merged;
    for (const auto& [value, mass] : raw) {
        if (!merged.empty() && std::abs(value - merged.back().first) <= 1e-12 * std::max(1.0, std::abs(value)))
            merged.back().second += mass;
        else
            merged.emplace_back(value, mass);
    }
    return merged;
}

std::vector<std::vector<double>> codewords(const Trellis& trellis)
{
    std::vector<std::vector<double>> words;
    for (const Path& path : enumerate_paths(trellis, trellis.source(), trellis.sink(), path_cap())) {
        std::vector<double> word;
        for (EdgeId e : path) word.push_back(trellis.edge(e).clabel);
        words.push_back(std::move(word));
    }
    return words;
}

double likelihood(const ChannelModel& channel, std::span<const double> codeword, std::span<const double> received)
{
    if (codeword.size() != received.size()) throw Error("codeword and received word differ in length");
    double p = 1.0;
    for (std::size_t i = 0; i < codeword.size(); ++i) p *= channel.likelihood(received[i], codeword[i]);
    return p;
}

double posterior_entropy(const std::vector<std::vector<double>>& words, const ChannelModel& channel,
                         std::span<const double> received, std::optional<Constraint> constraint)
{
    double h = 0.0;
    for (double p : posteriors(words, channel, received, constraint))
        if (p > 0.0) h -= p * std::log2(p);
    return h;
}

double correlation_moment(const std::vector<std::vector<double>>& words, const ChannelModel& channel,
                          std::span<const double> received, std::span<const double> word, unsigned m,
                          std::optional<Constraint> constraint)
{
    const auto p = posteriors(words, channel, received, constraint);
    double total = 0.0;
    for (std::size_t k = 0; k < words.size(); ++k) {
        double corr = 0.0;
        for (std::size_t i = 0; i < word.size(); ++i) corr += words[k][i] * word[i];
        total += p[k] * std::pow(corr, static_cast<double>(m));
    }
    return total;
}

double symbol_probability(const std::vector<std::vector<double>>& words, const ChannelModel& channel,
                          std::span<const double> received, int depth, double symbol)
{
    double hit = 0.0;
    double total = 0.0;
    for (const auto& w : words) {
        const double p = likelihood(channel, w, received);
        total += p;
        if (w.at(static_cast<std::size_t>(depth) - 1) == symbol) hit += p;
    }
    if (!(total > 0.0)) throw Error("all codeword likelihoods are zero");
    return hit / total;
}

std::vector<double> convolutional_encode(const std::vector<unsigned>& generators, int memory,
                                         const std::vector<int>& info, bool terminated)
{
    std::vector<int> u = info;
    if (terminated) u.insert(u.end(), static_cast<std::size_t>(memory), 0);
    std::vector<double> out;
    for (std::size_t t = 0; t < u.size(); ++t) {
        for (unsigned g : generators) {
            int bit = 0;
            for (int d = 0; d <= memory && static_cast<std::size_t>(d) <= t; ++d)
                if ((g >> (memory - d)) & 1U) bit ^= u[t - d];
            out.push_back(bit ? -1.0 : 1.0);
        }
    }
    return out;
}

Trellis random_trellis(std::mt19937_64& rng, const RandomTrellisSpec& spec)
{
    std::uniform_int_distribution<int> rank_dist(spec.min_rank, spec.max_rank);
    std::uniform_int_distribution<int> width_dist(1, spec.max_width);
    std::uniform_int_distribution<int> parallel_dist(1, spec.max_parallel);
    std::uniform_real_distribution<double> lambda_dist(spec.min_lambda, spec.max_lambda);
    std::uniform_int_distribution<std::size_t> symbol_dist(0, spec.alphabet.size() - 1);
    std::bernoulli_distribution coin(0.3);

    for (;;) {
        const int n = rank_dist(rng);
        std::vector<std::vector<VertexId>> layers(static_cast<std::size_t>(n) + 1);
        TrellisBuilder builder(n);
        for (int i = 0; i <= n; ++i) {
            const int width = (i == 0 || i == n) ? 1 : width_dist(rng);
            for (int k = 0; k < width; ++k) layers[i].push_back(builder.add_vertex(i));
        }

        std::vector<std::pair<VertexId, VertexId>> links;
        for (int i = 1; i <= n; ++i) {
            const auto& prev = layers[i - 1];
            const auto& cur = layers[i];
            std::vector<bool> has_out(prev.size(), false);
            std::uniform_int_distribution<std::size_t> pick_prev(0, prev.size() - 1);
            std::uniform_int_distribution<std::size_t> pick_cur(0, cur.size() - 1);
            for (VertexId v : cur) {
                const auto u = pick_prev(rng);
                has_out[u] = true;
                links.emplace_back(prev[u], v);
            }
            for (std::size_t u = 0; u < prev.size(); ++u)
                if (!has_out[u]) links.emplace_back(prev[u], cur[pick_cur(rng)]);
            for (VertexId u : prev)
                for (VertexId v : cur)
                    if (coin(rng)) links.emplace_back(u, v);
        }

        std::vector<double> paths(static_cast<std::size_t>(layers.back().back()) + 1, 0.0);
        paths[layers[0][0]] = 1.0;
        std::vector<std::tuple<VertexId, VertexId, int>> edges;
        for (auto [u, v] : links) {
            const int copies = coin(rng) ? parallel_dist(rng) : 1;
            edges.emplace_back(u, v, copies);
            paths[v] += copies * paths[u];
        }
        if (paths[layers[n][0]] > static_cast<double>(spec.max_paths)) continue;

        for (auto [u, v, copies] : edges)
            for (int c = 0; c < copies; ++c) builder.add_edge(u, v, lambda_dist(rng), spec.alphabet[symbol_dist(rng)]);
        return builder.build();
    }
}

DepthFunctionTable random_depth_function(std::mt19937_64& rng, const Trellis& trellis, double lo, double hi)
{
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> values(trellis.num_edges());
    for (double& v : values) v = dist(rng);
    return DepthFunctionTable(std::move(values));
}

} // namespace trellis::oracle
