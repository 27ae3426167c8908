#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trellis/trellis.hpp"

namespace trellis {

/// Memoryless binary-input channel with bipolar inputs c in {-1, +1}.
class ChannelModel {
public:
    enum class Kind { bsc, awgn };

    /// Binary symmetric channel, crossover probability 0 < p < 1/2.
    static ChannelModel bsc(double crossover);
    /// Additive white Gaussian noise, variance sigma2 > 0.
    static ChannelModel awgn(double sigma2);

    Kind kind() const { return kind_; }
    double parameter() const { return parameter_; }

    /// P(r | c) for BSC (r in {-1, +1}); the Gaussian density for AWGN.
    double likelihood(double received, double sent) const;

    /// Output of the channel for input `sent` given a uniform draw u in [0,1)
    /// (BSC) or a standard normal draw (AWGN).
    double transmit(double sent, double draw) const;

    std::string to_string() const;

private:
    ChannelModel(Kind kind, double parameter) : kind_(kind), parameter_(parameter) {}

    Kind kind_;
    double parameter_;
};

/// "bsc:<p>" or "awgn:<sigma2>".
ChannelModel parse_channel(std::string_view spec);

/// Copy of `trellis` with lambda(e) = P(r_i | c(e)), i = depth(fin(e)).
Trellis channel_lambda_labels(const Trellis& trellis, const ChannelModel& channel, std::span<const double> received);

/// A codeword drawn by walking the trellis from A with uniform branch
/// choices, and its noisy channel output. Deterministic in `seed`.
struct Transmission {
    std::vector<double> codeword;
    std::vector<double> received;
};

Transmission simulate_transmission(const Trellis& trellis, const ChannelModel& channel, std::uint64_t seed);

/**
 * Constants of the affine relation between the conditional uncertainty
 * H(c|w) = -log2 P(c|w) and the correlation c w^T:
 *
 *   log2 P(w|c) = k1b + k2 * c w^T
 *   H(c|w)      = k1 - k2 * c w^T,   k1 = k1a - k1b
 *
 * k1a = log2(P(w)/P(c)) depends on the prior over codewords and is supplied
 * by the caller (zero for a uniform prior over all 2^n bipolar words).
 */
struct UncertaintyConstants {
    double k1a = 0.0;
    double k1b = 0.0;
    double k2 = 0.0;

    double k1() const { return k1a - k1b; }
    /// H(c|w) for a given correlation value.
    double uncertainty(double correlation) const { return k1() - k2 * correlation; }
};

UncertaintyConstants uncertainty_constants(const ChannelModel& channel, std::span<const double> word, double k1a = 0.0);

} // namespace trellis
