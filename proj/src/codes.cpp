#include "trellis/codes.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "trellis/errors.hpp"

namespace trellis {

Trellis build_spc_trellis(int n)
{
    if (n < 2) throw Error("single parity check code needs n >= 2, got " + std::to_string(n));
    TrellisBuilder builder(n);
    const VertexId source = builder.add_vertex(0);
    std::vector<VertexId> prev{source};
    for (int i = 1; i < n; ++i) {
        const std::vector<VertexId> cur{builder.add_vertex(i), builder.add_vertex(i)};
        for (std::size_t parity = 0; parity < prev.size(); ++parity)
            for (std::size_t next = 0; next < 2; ++next)
                builder.add_edge(prev[parity], cur[next], 1.0, bipolar(static_cast<unsigned>(parity ^ next)));
        prev = cur;
    }
    const VertexId sink = builder.add_vertex(n);
    for (unsigned parity = 0; parity < 2; ++parity) builder.add_edge(prev[parity], sink, 1.0, bipolar(parity));
    return builder.build();
}

ConvolutionalCode parse_generators(std::string_view octal_list)
{
    ConvolutionalCode code;
    std::size_t pos = 0;
    while (pos < octal_list.size()) {
        while (pos < octal_list.size() && (octal_list[pos] == ',' || octal_list[pos] == ' ')) ++pos;
        if (pos == octal_list.size()) break;
        unsigned value = 0;
        std::size_t digits = 0;
        for (; pos < octal_list.size() && octal_list[pos] != ',' && octal_list[pos] != ' '; ++pos, ++digits) {
            const char ch = octal_list[pos];
            if (ch < '0' || ch > '7')
                throw ParseError("invalid octal generator digit '" + std::string(1, ch) + "' in \"" +
                            std::string(octal_list) + "\"");
            if (digits >= 7) throw ParseError("generator too long: memory is limited to 16");
            value = value * 8 + static_cast<unsigned>(ch - '0');
        }
        if (value == 0) throw ParseError("zero generator polynomial");
        code.generators.push_back(value);
        code.memory = std::max(code.memory, static_cast<int>(std::bit_width(value)) - 1);
    }
    if (code.generators.empty()) throw ParseError("no generators given");
    if (code.memory > 16) throw ParseError("generator memory " + std::to_string(code.memory) + " exceeds 16");
    return code;
}

Trellis build_conv_trellis(const ConvolutionalCode& code, int info_len, bool terminated)
{
    if (code.generators.empty()) throw Error("no generators given");
    if (code.memory > 16) throw Error("generator memory exceeds 16");
    if (info_len < 0) throw Error("negative information length");
    const int mem = code.memory;
    const int branches = info_len + (terminated ? mem : 0);
    if (branches == 0) throw Error("code has length zero");

    const std::size_t states = std::size_t{1} << mem;
    // reachable[t][s]: state s occurs at branch depth t on some full path.
    std::vector<std::vector<char>> reachable(branches + 1, std::vector<char>(states, 0));
    reachable[0][0] = 1;
    for (int t = 0; t < branches; ++t) {
        const unsigned max_input = t < info_len ? 1 : 0;
        for (std::size_t s = 0; s < states; ++s) {
            if (!reachable[t][s]) continue;
            for (unsigned u = 0; u <= max_input; ++u) reachable[t + 1][((u << mem) | s) >> 1] = 1;
        }
    }
    if (terminated) {
        std::vector<char> alive(states, 0);
        alive[0] = 1;
        for (int t = branches; t >= 0; --t) {
            std::vector<char> keep(states, 0);
            for (std::size_t s = 0; s < states; ++s) {
                if (!reachable[t][s]) continue;
                if (t == branches) {
                    keep[s] = s == 0;
                    continue;
                }
                const unsigned max_input = t < info_len ? 1 : 0;
                for (unsigned u = 0; u <= max_input; ++u)
                    if (alive[((u << mem) | s) >> 1]) keep[s] = 1;
            }
            reachable[t] = keep;
            alive = keep;
        }
    }

    TrellisBuilder builder(branches);
    std::vector<std::vector<VertexId>> vertex(branches + 1, std::vector<VertexId>(states, 0));
    for (int t = 0; t < branches; ++t)
        for (std::size_t s = 0; s < states; ++s)
            if (reachable[t][s]) vertex[t][s] = builder.add_vertex(t);
    const VertexId sink = builder.add_vertex(branches);

    std::vector<std::vector<double>> symbols;
    for (int t = 0; t < branches; ++t) {
        const unsigned max_input = t < info_len ? 1 : 0;
        for (std::size_t s = 0; s < states; ++s) {
            if (!reachable[t][s]) continue;
            for (unsigned u = 0; u <= max_input; ++u) {
                const std::size_t reg = (static_cast<std::size_t>(u) << mem) | s;
                const std::size_t next = reg >> 1;
                if (t + 1 < branches && !reachable[t + 1][next]) continue;
                if (t + 1 == branches && terminated && next != 0) continue;
                const VertexId to = t + 1 == branches ? sink : vertex[t + 1][next];
                std::vector<double> out;
                for (unsigned g : code.generators) out.push_back(bipolar(std::popcount(g & reg) & 1U));
                builder.add_edge(vertex[t][s], to, 1.0, 0.0);
                symbols.push_back(std::move(out));
            }
        }
    }
    Trellis branch_trellis = builder.build();
    std::vector<std::vector<double>> table(symbols.size());
    for (std::size_t k = 0; k < symbols.size(); ++k) table[builder.edge_map()[k]] = std::move(symbols[k]);
    return split_multi_symbol_edges(branch_trellis, code.outputs(), table);
}

} // namespace trellis
