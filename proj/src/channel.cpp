#include "trellis/channel.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "trellis/errors.hpp"
#include "trellis/trellis_io.hpp"

namespace trellis {

ChannelModel ChannelModel::bsc(double crossover)
{
    if (!(crossover > 0.0 && crossover < 0.5))
        throw Error("BSC crossover probability must lie in (0, 1/2), got " + format_real(crossover));
    return {Kind::bsc, crossover};
}

ChannelModel ChannelModel::awgn(double sigma2)
{
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
        throw Error("AWGN noise variance must be positive, got " + format_real(sigma2));
    return {Kind::awgn, sigma2};
}

double ChannelModel::likelihood(double received, double sent) const
{
    if (kind_ == Kind::bsc) return received == sent ? 1.0 - parameter_ : parameter_;
    const double d = received - sent;
    return std::exp(-d * d / (2.0 * parameter_)) / std::sqrt(2.0 * std::numbers::pi * parameter_);
}

double ChannelModel::transmit(double sent, double draw) const
{
    if (kind_ == Kind::bsc) return draw < parameter_ ? -sent : sent;
    return sent + std::sqrt(parameter_) * draw;
}

std::string ChannelModel::to_string() const
{
    return (kind_ == Kind::bsc ? "bsc:" : "awgn:") + format_real(parameter_);
}

ChannelModel parse_channel(std::string_view spec)
{
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos) throw ParseError("channel must be 'bsc:<p>' or 'awgn:<sigma2>'");
    const auto kind = spec.substr(0, colon);
    const double value = parse_real(spec.substr(colon + 1));
    if (kind == "bsc") return ChannelModel::bsc(value);
    if (kind == "awgn") return ChannelModel::awgn(value);
    throw ParseError("unknown channel '" + std::string(kind) + "'");
}

Trellis channel_lambda_labels(const Trellis& trellis, const ChannelModel& channel, std::span<const double> received)
{
    if (received.size() != static_cast<std::size_t>(trellis.rank()))
        throw Error("received word has length " + std::to_string(received.size()) + ", trellis rank is " +
                    std::to_string(trellis.rank()));
    if (channel.kind() == ChannelModel::Kind::bsc)
        for (double r : received)
            if (r != 1.0 && r != -1.0) throw Error("BSC received symbols must be +1 or -1");
    std::vector<double> lambdas(trellis.num_edges());
    for (const Edge& e : trellis.edges())
        lambdas[e.id] = channel.likelihood(received[trellis.depth(e.fin) - 1], e.clabel);
    return trellis.with_lambdas(lambdas);
}

Transmission simulate_transmission(const Trellis& trellis, const ChannelModel& channel, std::uint64_t seed)
{
    require_valid(trellis);
    std::mt19937_64 rng(seed);
    Transmission tx;
    VertexId v = trellis.source();
    while (v != trellis.sink()) {
        const auto out = trellis.outgoing(v);
        std::uniform_int_distribution<std::size_t> pick(0, out.size() - 1);
        const Edge& e = trellis.edge(out[pick(rng)]);
        tx.codeword.push_back(e.clabel);
        v = e.fin;
    }
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double c : tx.codeword)
        tx.received.push_back(
            channel.transmit(c, channel.kind() == ChannelModel::Kind::bsc ? uniform(rng) : normal(rng)));
    return tx;
}

UncertaintyConstants uncertainty_constants(const ChannelModel& channel, std::span<const double> word, double k1a)
{
    const auto n = static_cast<double>(word.size());
    UncertaintyConstants k;
    k.k1a = k1a;
    if (channel.kind() == ChannelModel::Kind::bsc) {
        const double p = channel.parameter();
        k.k2 = 0.5 * std::log2((1.0 - p) / p);
        k.k1b = 0.5 * n * std::log2(p * (1.0 - p));
    } else {
        const double s2 = channel.parameter();
        double energy = 0.0;
        for (double w : word) energy += w * w;
        k.k2 = 1.0 / (s2 * std::numbers::ln2);
        k.k1b = -0.5 * n * std::log2(2.0 * std::numbers::pi * s2) - (n + energy) / (2.0 * s2 * std::numbers::ln2);
    }
    return k;
}

} // namespace trellis
