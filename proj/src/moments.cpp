#include "trellis/moments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

namespace trellis {

std::vector<double> symbols_at_depth(const Trellis& trellis, int depth)
{
    std::vector<double> symbols;
    for (const Edge& e : trellis.section(depth))
        if (std::find(symbols.begin(), symbols.end(), e.clabel) == symbols.end()) symbols.push_back(e.clabel);
    return symbols;
}

CountedRun counted_run(const Trellis& trellis, const DepthFunctionTable& g, unsigned max_order, RunOptions options)
{
    CountedRun run;
    const LiftedLabels<RealSemiring> labels(trellis, g, max_order, run.ops);
    const auto state = run_numerators<RealSemiring>(trellis, labels, Direction::forward, options, run.ops);
    run.moments = trellis_moments<RealSemiring>(trellis, state);
    return run;
}

OpCounter counted_symbol_pass(const Trellis& trellis, const DepthFunctionTable& g, unsigned max_order)
{
    const LiftedLabels<RealSemiring> labels(trellis, g, max_order);
    const auto forward = run_numerators<RealSemiring>(trellis, labels, Direction::forward);
    const auto backward = run_numerators<RealSemiring>(trellis, labels, Direction::backward);
    OpCounter ops;
    for (int i = 1; i <= trellis.rank(); ++i)
        for (double x : symbols_at_depth(trellis, i))
            symbol_numerator<RealSemiring>(trellis, labels, forward, backward, i, x, max_order, ops);
    return ops;
}

double NormalizedState::reconstruct(VertexId v, unsigned m) const
{
    return moment(v, m) * std::exp(log_flow[v]);
}

NormalizedState normalized_states(const Trellis& trellis, const DepthFunctionTable& g, unsigned max_order,
                                  Direction direction, RunOptions options)
{
    require_valid(trellis);
    g.require_defined(trellis);
    if (max_order > max_supported_order) throw Error("moment order exceeds " + std::to_string(max_supported_order));
    for (const Edge& e : trellis.edges())
        if (!(e.lambda >= 0.0)) throw Error("normalized recursion requires nonnegative lambda labels");

    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    const auto stride = static_cast<std::size_t>(max_order) + 1;
    NormalizedState state;
    state.direction = direction;
    state.max_order = max_order;
    state.log_flow.assign(trellis.num_vertices(), neg_inf);
    state.moments.assign(trellis.num_vertices() * stride, 0.0);
    const bool forward = direction == Direction::forward;
    const VertexId start = forward ? trellis.source() : trellis.sink();
    state.log_flow[start] = 0.0;
    state.moments[start * stride] = 1.0;

    const auto& binom = BinomialTable::instance();
    constexpr VertexId none = std::numeric_limits<VertexId>::max();
    std::atomic<VertexId> zero_flow{none};

    NoCount unused;
    detail::for_each_layer_vertex(trellis, direction, options.threads, unused, [&](VertexId v, NoCount&) {
        const auto edges = forward ? trellis.incoming(v) : trellis.outgoing(v);
        double log_total = neg_inf;
        for (EdgeId eid : edges) {
            const Edge& e = trellis.edge(eid);
            const double t = std::log(e.lambda) + state.log_flow[forward ? e.init : e.fin];
            if (t == neg_inf) continue;
            log_total = log_total == neg_inf ? t
                                             : std::max(log_total, t) + std::log1p(std::exp(-std::abs(log_total - t)));
        }
        if (log_total == neg_inf) {
            VertexId expected = none;
            zero_flow.compare_exchange_strong(expected, v);
            return;
        }
        state.log_flow[v] = log_total;
        double* out = &state.moments[v * stride];
        out[0] = 1.0;
        for (unsigned m = 1; m <= max_order; ++m) out[m] = 0.0;
        for (EdgeId eid : edges) {
            const Edge& e = trellis.edge(eid);
            const VertexId u = forward ? e.init : e.fin;
            const double t = std::log(e.lambda) + state.log_flow[u];
            if (t == neg_inf) continue;
            const double weight = std::exp(t - log_total);
            const double* in = &state.moments[u * stride];
            for (unsigned m = 1; m <= max_order; ++m) {
                double inner = in[m];
                double gl = 1.0;
                for (unsigned l = 1; l <= m; ++l) {
                    gl *= g[eid];
                    inner += static_cast<double>(binom(m, l)) * gl * in[m - l];
                }
                out[m] += weight * inner;
            }
        }
    });

    if (zero_flow.load() != none) {
        const VertexId v = zero_flow.load();
        throw Error("zero flow at vertex " + std::to_string(v) + " (depth " + std::to_string(trellis.depth(v)) +
                    "); normalized moments undefined");
    }
    return state;
}

LogMoments normalized_trellis_moments(const Trellis& trellis, const NormalizedState& state)
{
    const VertexId end = state.direction == Direction::forward ? trellis.sink() : trellis.source();
    LogMoments out;
    out.log_flow = state.log_flow[end];
    for (unsigned m = 0; m <= state.max_order; ++m) out.moments.push_back(state.moment(end, m));
    return out;
}

LogMoments normalized_symbol_moments(const Trellis& trellis, const DepthFunctionTable& g,
                                     const NormalizedState& forward, const NormalizedState& backward, int depth,
                                     double symbol)
{
    if (depth < 1 || depth > trellis.rank())
        throw Error("symbol depth " + std::to_string(depth) + " outside [1, " + std::to_string(trellis.rank()) + "]");
    if (forward.direction != Direction::forward || backward.direction != Direction::backward)
        throw Error("symbol moments need a forward and a backward state");
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    const unsigned max_order = std::min(forward.max_order, backward.max_order);
    const auto& binom = BinomialTable::instance();

    std::vector<std::pair<const Edge*, double>> terms;
    double log_total = neg_inf;
    for (const Edge& e : trellis.section(depth)) {
        if (e.clabel != symbol || e.lambda == 0.0) continue;
        const double t = std::log(e.lambda) + forward.log_flow[e.init] + backward.log_flow[e.fin];
        if (t == neg_inf) continue;
        terms.emplace_back(&e, t);
        log_total = log_total == neg_inf ? t : std::max(log_total, t) + std::log1p(std::exp(-std::abs(log_total - t)));
    }
    LogMoments out;
    out.log_flow = log_total;
    if (log_total == neg_inf) return out;

    out.moments.assign(max_order + 1, 0.0);
    std::vector<double> head(max_order + 1);
    for (const auto& [e, t] : terms) {
        const double weight = std::exp(t - log_total);
        // head[l]: normalized moment of f over paths A -> init(e) extended by e
        for (unsigned l = 0; l <= max_order; ++l) {
            double sum = 0.0;
            double gk = 1.0;
            for (unsigned k = 0; k <= l; ++k) {
                sum += static_cast<double>(binom(l, k)) * gk * forward.moment(e->init, l - k);
                gk *= g[e->id];
            }
            head[l] = sum;
        }
        for (unsigned m = 0; m <= max_order; ++m) {
            double sum = 0.0;
            for (unsigned l = 0; l <= m; ++l)
                sum += static_cast<double>(binom(m, l)) * head[l] * backward.moment(e->fin, m - l);
            out.moments[m] += weight * sum;
        }
    }
    return out;
}

} // namespace trellis
