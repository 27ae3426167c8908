#pragma once

#include <string_view>
#include <vector>

#include "trellis/trellis.hpp"

namespace trellis {

/// Bipolar mapping used for every code trellis: bit 0 -> +1, bit 1 -> -1.
inline double bipolar(unsigned bit) { return bit ? -1.0 : 1.0; }

/// Trellis of the (n, n-1) even-parity code: one state per running parity,
/// all lambda = 1. For n = 4 this is the 8-vertex, 12-edge trellis with
/// vertex 1 = parity 0 and vertex 2 = parity 1 at depth 1.
Trellis build_spc_trellis(int n);

/// Rate 1/c feedforward convolutional code. Generator bit k (from the least
/// significant end) taps the input delayed by memory - k, so the octal
/// generator's leading bit taps the current input.
struct ConvolutionalCode {
    std::vector<unsigned> generators;
    int memory = 0;

    std::size_t outputs() const { return generators.size(); }
};

/// Parses a list of octal generators separated by commas or spaces, e.g.
/// "7,5" or "5 7". Memory is the longest generator's degree; at most 16.
ConvolutionalCode parse_generators(std::string_view octal_list);

/**
 * Code trellis with one bipolar code symbol per edge. Branches of the
 * shift-register trellis carry all c outputs and are split into chains.
 * Terminated: `memory` zero-input tail branches return to state 0, giving
 * rank c * (info_len + memory). Unterminated: every state at the last branch
 * depth is merged into the sink, giving rank c * info_len.
 */
Trellis build_conv_trellis(const ConvolutionalCode& code, int info_len, bool terminated);

} // namespace trellis
