#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "trellis/binomial.hpp"
#include "trellis/depth_function.hpp"
#include "trellis/errors.hpp"
#include "trellis/op_counter.hpp"
#include "trellis/semiring.hpp"
#include "trellis/trellis.hpp"
#include "trellis/trellis_io.hpp"

namespace trellis {

enum class Direction { forward, backward };

/// Engine execution settings. `threads` > 1 runs each depth layer's vertices
/// concurrently; layers remain a sequential barrier.
struct RunOptions {
    int threads = 1;
};

/// Storage cell for a carrier value; `bool` is widened to a byte.
template <class V>
using carrier_storage_t = std::conditional_t<std::is_same_v<V, bool>, std::uint8_t, V>;

/**
 * Per-vertex numerators of orders 0..max_order, for one direction.
 *
 * Forward: at(v, m) = sum over paths P: A -> v of lambda(P) * f(P)^m.
 * Backward: at(v, m) = sum over paths P: v -> B of lambda(P) * f(P)^m.
 * Order 0 is the flow F(A, v) resp. F(v, B).
 */
template <Semiring S>
class MomentState {
public:
    using value_type = typename S::value_type;
    using storage_type = carrier_storage_t<value_type>;

    MomentState(Direction direction, unsigned max_order, std::size_t num_vertices)
        : direction_(direction), max_order_(max_order), table_(num_vertices * (max_order + 1), storage_type(S::zero()))
    {
    }

    Direction direction() const { return direction_; }
    unsigned max_order() const { return max_order_; }
    std::size_t num_vertices() const { return table_.size() / (max_order_ + 1); }

    value_type at(VertexId v, unsigned m) const { return static_cast<value_type>(table_[index(v, m)]); }
    void set(VertexId v, unsigned m, value_type x) { table_[index(v, m)] = static_cast<storage_type>(x); }

    std::vector<value_type> row(VertexId v) const
    {
        std::vector<value_type> out(max_order_ + 1);
        for (unsigned m = 0; m <= max_order_; ++m) out[m] = at(v, m);
        return out;
    }

private:
    std::size_t index(VertexId v, unsigned m) const { return static_cast<std::size_t>(v) * (max_order_ + 1) + m; }

    Direction direction_;
    unsigned max_order_;
    std::vector<storage_type> table_;
};

/// theta^(m) = alpha^(m)(B) = beta^(m)(A), and theta^(m) / theta^(0) where
/// the carrier supports division. `normalized` is empty when theta^(0) is
/// zero or the semiring has no real ratio.
template <Semiring S>
struct TrellisMoments {
    std::vector<typename S::value_type> numerators;
    std::optional<std::vector<double>> normalized;
};

/// Omega_i^(m)(x) numerators and their ratios to Omega_i^(0)(x).
template <Semiring S>
struct SymbolMoments {
    int depth = 0;
    double symbol = 0.0;
    std::vector<typename S::value_type> numerators;
    std::optional<std::vector<double>> normalized;
};

namespace detail {

/// Lifts a depth-function value. Only the real semiring accepts negative
/// values; the other carriers embed the nonnegative reals.
template <Semiring S>
typename S::value_type lift_g(double x)
{
    if constexpr (!std::is_same_v<S, RealSemiring>) {
        if (x < 0.0)
            throw Error("semiring " + std::string(S::name) + " cannot represent negative g value " + format_real(x));
    }
    return S::from_real(x);
}

} // namespace detail

/// Edge labels lifted into a semiring, with g(e)^l precomputed for l <= M.
template <Semiring S>
class LiftedLabels {
public:
    using value_type = typename S::value_type;
    using storage_type = carrier_storage_t<value_type>;

    template <class Counter = NoCount>
    LiftedLabels(const Trellis& trellis, const DepthFunctionTable& g, unsigned max_order, Counter&& counter = {})
        : max_order_(max_order)
    {
        g.require_defined(trellis);
        std::vector<value_type> lambda(trellis.num_edges());
        std::vector<value_type> gl(trellis.num_edges());
        for (const Edge& e : trellis.edges()) {
            lambda[e.id] = S::from_real(e.lambda);
            gl[e.id] = max_order == 0 ? S::one() : detail::lift_g<S>(g[e.id]);
        }
        init(lambda, gl, counter);
    }

    /// Labels given directly as carrier values.
    template <class Counter = NoCount>
    LiftedLabels(const std::vector<value_type>& lambda, const std::vector<value_type>& g, unsigned max_order,
                 Counter&& counter = {})
        : max_order_(max_order)
    {
        if (lambda.size() != g.size()) throw Error("lambda and g tables differ in length");
        init(lambda, g, counter);
    }

    unsigned max_order() const { return max_order_; }
    value_type lambda(EdgeId e) const { return static_cast<value_type>(lambda_[e]); }
    value_type gpow(EdgeId e, unsigned l) const
    {
        return static_cast<value_type>(gpow_[static_cast<std::size_t>(e) * (max_order_ + 1) + l]);
    }
    std::size_t num_edges() const { return lambda_.size(); }

private:
    template <class Counter>
    void init(const std::vector<value_type>& lambda, const std::vector<value_type>& g, Counter& counter)
    {
        if (max_order_ > max_supported_order)
            throw Error("moment order " + std::to_string(max_order_) + " exceeds " + std::to_string(max_supported_order));
        const std::size_t stride = max_order_ + 1;
        lambda_.resize(lambda.size());
        gpow_.assign(lambda.size() * stride, storage_type(S::one()));
        for (std::size_t e = 0; e < lambda.size(); ++e) {
            lambda_[e] = static_cast<storage_type>(lambda[e]);
            if (max_order_ >= 1) gpow_[e * stride + 1] = static_cast<storage_type>(g[e]);
            for (unsigned l = 2; l <= max_order_; ++l) {
                gpow_[e * stride + l] = static_cast<storage_type>(
                    S::mul(static_cast<value_type>(gpow_[e * stride + l - 1]), g[e]));
                counter.power_mul();
            }
        }
    }

    unsigned max_order_;
    std::vector<storage_type> lambda_;
    std::vector<storage_type> gpow_;
};

namespace detail {

/// Visits every vertex layer by layer (depth 1..n forward, n-1..0 backward),
/// running each layer's vertices across `threads` OpenMP workers. Each
/// worker tallies into its own counter; tallies merge once at the end.
template <class Counter, class Update>
void for_each_layer_vertex(const Trellis& t, Direction dir, int threads, Counter& counter, Update&& update)
{
    const int n = t.rank();
    if (threads <= 1) {
        for (int step = 1; step <= n; ++step)
            for (VertexId v : t.layer(dir == Direction::forward ? step : n - step)) update(v, counter);
        return;
    }
#pragma omp parallel num_threads(threads)
    {
        Counter local{};
        for (int step = 1; step <= n; ++step) {
            const int i = dir == Direction::forward ? step : n - step;
            const auto layer = t.layer(i);
            const auto first = static_cast<std::int64_t>(layer.first);
            const auto last = static_cast<std::int64_t>(layer.last);
#pragma omp for schedule(static)
            for (std::int64_t v = first; v < last; ++v) update(static_cast<VertexId>(v), local);
        }
#pragma omp critical(trellis_counter_merge)
        counter += local;
    }
}

/// One vertex of the forward or backward binomial recursion, all orders.
/// Operation accounting: for order m > 0 each edge costs 2m + 2
/// multiplications (the l = 0 binomial term counts one) and m additions;
/// order 0 costs one multiplication; edges are joined by rho - 1 additions.
template <Semiring S, class Counter>
void update_vertex(const Trellis& t, const LiftedLabels<S>& labels, MomentState<S>& state, VertexId v,
                   Counter& counter)
{
    using V = typename S::value_type;
    const auto& binom = BinomialTable::instance();
    const bool forward = state.direction() == Direction::forward;
    const auto edges = forward ? t.incoming(v) : t.outgoing(v);
    const unsigned max_order = state.max_order();

    for (unsigned m = 0; m <= max_order; ++m) {
        V acc = S::zero();
        bool first = true;
        for (EdgeId eid : edges) {
            const Edge& e = t.edge(eid);
            const VertexId u = forward ? e.init : e.fin;
            V inner = state.at(u, m);
            if (m > 0) counter.mul();
            for (unsigned l = 1; l <= m; ++l) {
                inner = S::add(inner, nat_scale<S>(binom(m, l), S::mul(labels.gpow(eid, l), state.at(u, m - l))));
                counter.mul(2);
                counter.add();
            }
            const V term = S::mul(labels.lambda(eid), inner);
            counter.mul();
            if (first) {
                acc = term;
                first = false;
            } else {
                acc = S::add(acc, term);
                counter.add();
            }
        }
        state.set(v, m, acc);
    }
}

template <Semiring S>
MomentState<S> initial_state(const Trellis& t, Direction dir, unsigned max_order)
{
    MomentState<S> state(dir, max_order, t.num_vertices());
    state.set(dir == Direction::forward ? t.source() : t.sink(), 0, S::one());
    return state;
}

} // namespace detail

/// Runs the forward (or backward) numerator recursion with precomputed labels.
template <Semiring S, class Counter = NoCount>
MomentState<S> run_numerators(const Trellis& trellis, const LiftedLabels<S>& labels, Direction dir,
                              RunOptions options = {}, Counter&& counter = {})
{
    require_valid(trellis);
    if (labels.num_edges() != trellis.num_edges()) throw Error("label table does not match trellis");
    auto state = detail::initial_state<S>(trellis, dir, labels.max_order());
    std::remove_cvref_t<Counter>& sink = counter;
    detail::for_each_layer_vertex(trellis, dir, options.threads, sink, [&](VertexId v, auto& local) {
        detail::update_vertex<S>(trellis, labels, state, v, local);
    });
    return state;
}

/// alpha^(m)(v) for all vertices and m <= max_order.
template <Semiring S>
MomentState<S> forward_numerators(const Trellis& trellis, const DepthFunctionTable& g, unsigned max_order,
                                  RunOptions options = {})
{
    return run_numerators<S>(trellis, LiftedLabels<S>(trellis, g, max_order), Direction::forward, options);
}

/// beta^(m)(v) for all vertices and m <= max_order.
template <Semiring S>
MomentState<S> backward_numerators(const Trellis& trellis, const DepthFunctionTable& g, unsigned max_order,
                                   RunOptions options = {})
{
    return run_numerators<S>(trellis, LiftedLabels<S>(trellis, g, max_order), Direction::backward, options);
}

template <Semiring S>
std::optional<std::vector<double>> normalize_numerators(const std::vector<typename S::value_type>& numerators)
{
    if constexpr (RealValuedSemiring<S>) {
        if (numerators.empty() || numerators[0] == S::zero()) return std::nullopt;
        std::vector<double> out(numerators.size());
        for (std::size_t m = 0; m < numerators.size(); ++m) out[m] = S::ratio(numerators[m], numerators[0]);
        return out;
    } else {
        return std::nullopt;
    }
}

/// theta^(m) read off the sink (forward state) or the source (backward state).
template <Semiring S>
TrellisMoments<S> trellis_moments(const Trellis& trellis, const MomentState<S>& state)
{
    const VertexId end = state.direction() == Direction::forward ? trellis.sink() : trellis.source();
    TrellisMoments<S> result;
    result.numerators = state.row(end);
    result.normalized = normalize_numerators<S>(result.numerators);
    return result;
}

/**
 * Omega_i^(m)(x) for a single order m, summed over the edges of E_{i-1,i}
 * with c-label x. Per edge this costs m^2 + 3m + 2 multiplications.
 */
template <Semiring S, class Counter = NoCount>
typename S::value_type symbol_numerator(const Trellis& trellis, const LiftedLabels<S>& labels,
                                        const MomentState<S>& forward, const MomentState<S>& backward, int depth,
                                        double symbol, unsigned m, Counter&& counter = {})
{
    using V = typename S::value_type;
    const auto& binom = BinomialTable::instance();
    V total = S::zero();
    bool first_edge = true;
    for (const Edge& e : trellis.section(depth)) {
        if (e.clabel != symbol) continue;
        V outer = S::zero();
        for (unsigned l = 0; l <= m; ++l) {
            V inner = forward.at(e.init, l);
            for (unsigned k = 1; k <= l; ++k) {
                inner = S::add(inner, nat_scale<S>(binom(l, k), S::mul(labels.gpow(e.id, k), forward.at(e.init, l - k))));
                counter.mul(2);
                counter.add();
            }
            V term = S::mul(backward.at(e.fin, m - l), inner);
            counter.mul();
            if (l > 0) {
                term = nat_scale<S>(binom(m, l), term);
                counter.mul();
                outer = S::add(outer, term);
                counter.add();
            } else {
                outer = term;
            }
        }
        const V contribution = S::mul(labels.lambda(e.id), outer);
        counter.mul();
        if (first_edge) {
            total = contribution;
            first_edge = false;
        } else {
            total = S::add(total, contribution);
            counter.add();
        }
    }
    return total;
}

/// Symbol moments of orders 0..M at depth i for c-label x, where M is the
/// smaller of the two states' orders.
template <Semiring S>
SymbolMoments<S> symbol_moments(const Trellis& trellis, const LiftedLabels<S>& labels, const MomentState<S>& forward,
                                const MomentState<S>& backward, int depth, double symbol)
{
    if (depth < 1 || depth > trellis.rank())
        throw Error("symbol depth " + std::to_string(depth) + " outside [1, " + std::to_string(trellis.rank()) + "]");
    const unsigned max_order = std::min({forward.max_order(), backward.max_order(), labels.max_order()});
    SymbolMoments<S> result;
    result.depth = depth;
    result.symbol = symbol;
    for (unsigned m = 0; m <= max_order; ++m)
        result.numerators.push_back(symbol_numerator<S>(trellis, labels, forward, backward, depth, symbol, m));
    result.normalized = normalize_numerators<S>(result.numerators);
    return result;
}

template <Semiring S>
SymbolMoments<S> symbol_moments(const Trellis& trellis, const DepthFunctionTable& g, const MomentState<S>& forward,
                                const MomentState<S>& backward, int depth, double symbol)
{
    const unsigned max_order = std::min(forward.max_order(), backward.max_order());
    return symbol_moments<S>(trellis, LiftedLabels<S>(trellis, g, max_order), forward, backward, depth, symbol);
}

/// Distinct c-labels appearing on edges of E_{i-1,i}, in first-seen order.
std::vector<double> symbols_at_depth(const Trellis& trellis, int depth);

/**
 * alpha_{y,z}^{(k,m)}(v) = sum over P: A -> v of f_y(P)^k f_z(P)^m lambda(P),
 * for all k <= K and m <= M.
 */
template <Semiring S>
class JointState {
public:
    using value_type = typename S::value_type;
    using storage_type = carrier_storage_t<value_type>;

    JointState(unsigned order_y, unsigned order_z, std::size_t num_vertices)
        : order_y_(order_y), order_z_(order_z),
          table_(num_vertices * (order_y + 1) * (order_z + 1), storage_type(S::zero()))
    {
    }

    unsigned order_y() const { return order_y_; }
    unsigned order_z() const { return order_z_; }
    value_type at(VertexId v, unsigned k, unsigned m) const { return static_cast<value_type>(table_[index(v, k, m)]); }
    void set(VertexId v, unsigned k, unsigned m, value_type x) { table_[index(v, k, m)] = static_cast<storage_type>(x); }

private:
    std::size_t index(VertexId v, unsigned k, unsigned m) const
    {
        return (static_cast<std::size_t>(v) * (order_y_ + 1) + k) * (order_z_ + 1) + m;
    }

    unsigned order_y_;
    unsigned order_z_;
    std::vector<storage_type> table_;
};

template <Semiring S>
JointState<S> joint_forward_numerators(const Trellis& trellis, const DepthFunctionTable& gy,
                                       const DepthFunctionTable& gz, unsigned order_y, unsigned order_z,
                                       RunOptions options = {})
{
    using V = typename S::value_type;
    require_valid(trellis);
    const LiftedLabels<S> ly(trellis, gy, order_y);
    const LiftedLabels<S> lz(trellis, gz, order_z);
    const auto& binom = BinomialTable::instance();

    JointState<S> state(order_y, order_z, trellis.num_vertices());
    state.set(trellis.source(), 0, 0, S::one());
    NoCount none;
    detail::for_each_layer_vertex(trellis, Direction::forward, options.threads, none, [&](VertexId v, NoCount&) {
        for (unsigned k = 0; k <= order_y; ++k) {
            for (unsigned m = 0; m <= order_z; ++m) {
                V acc = S::zero();
                for (EdgeId eid : trellis.incoming(v)) {
                    const VertexId u = trellis.edge(eid).init;
                    V inner = S::zero();
                    for (unsigned j = 0; j <= k; ++j) {
                        const V gy_term = ly.gpow(eid, k - j);
                        for (unsigned l = 0; l <= m; ++l) {
                            const V x = S::mul(S::mul(gy_term, lz.gpow(eid, m - l)), state.at(u, j, l));
                            inner = S::add(inner, nat_scale<S>(binom(k, j), nat_scale<S>(binom(m, l), x)));
                        }
                    }
                    acc = S::add(acc, S::mul(ly.lambda(eid), inner));
                }
                state.set(v, k, m, acc);
            }
        }
    });
    return state;
}

/// theta_{y,z}^{(k,m)} / theta^{(0,0)}; nullopt when the flow is zero.
template <RealValuedSemiring S>
std::optional<double> joint_moment(const Trellis& trellis, const JointState<S>& state, unsigned k, unsigned m)
{
    const auto flow = state.at(trellis.sink(), 0, 0);
    if (flow == S::zero()) return std::nullopt;
    return S::ratio(state.at(trellis.sink(), k, m), flow);
}

/// Real-semiring moments with every recursion operation counted.
struct CountedRun {
    TrellisMoments<RealSemiring> moments;
    OpCounter ops;
};

CountedRun counted_run(const Trellis& trellis, const DepthFunctionTable& g, unsigned max_order,
                       RunOptions options = {});

/// Operations spent computing Omega_i^(M)(x) for every depth i and every
/// c-label x present at that depth, given the forward/backward states.
OpCounter counted_symbol_pass(const Trellis& trellis, const DepthFunctionTable& g, unsigned max_order);

/**
 * Per-vertex moments alpha^(m)(v) / alpha^(0)(v) (or the backward analogue)
 * with flows kept as natural logarithms. Safe from underflow on long
 * trellises with tiny labels.
 */
struct NormalizedState {
    Direction direction = Direction::forward;
    unsigned max_order = 0;
    std::vector<double> log_flow;
    std::vector<double> moments; // |V| x (max_order + 1)

    double moment(VertexId v, unsigned m) const { return moments[static_cast<std::size_t>(v) * (max_order + 1) + m]; }
    /// alpha^(m)(v) recovered as moment * exp(log_flow).
    double reconstruct(VertexId v, unsigned m) const;
};

NormalizedState normalized_states(const Trellis& trellis, const DepthFunctionTable& g, unsigned max_order,
                                  Direction direction, RunOptions options = {});

/// Normalized moments of orders 0..M (entry 0 is 1) with the flow kept as
/// its natural logarithm. An empty edge set gives log_flow = -inf and no
/// moments.
struct LogMoments {
    double log_flow = 0.0;
    std::vector<double> moments;
};

/// theta-bar^(m) read off a normalized forward (sink) or backward (source) state.
LogMoments normalized_trellis_moments(const Trellis& trellis, const NormalizedState& state);

/// Omega-bar_i^(m)(x) from normalized forward and backward states.
LogMoments normalized_symbol_moments(const Trellis& trellis, const DepthFunctionTable& g,
                                     const NormalizedState& forward, const NormalizedState& backward, int depth,
                                     double symbol);

namespace reference {

/// Plain edge-major serial recursion kept as a cross-check for the
/// layer-parallel kernel. Computes powers of g on the fly.
template <Semiring S>
MomentState<S> numerators(const Trellis& trellis, const DepthFunctionTable& g, unsigned max_order, Direction dir)
{
    require_valid(trellis);
    g.require_defined(trellis);
    const auto& binom = BinomialTable::instance();
    auto state = detail::initial_state<S>(trellis, dir, max_order);
    const int n = trellis.rank();
    for (int step = 1; step <= n; ++step) {
        // Forward pushes section i into layer i; backward pulls section i+1 into layer i.
        const int section = dir == Direction::forward ? step : n - step + 1;
        for (const Edge& e : trellis.section(section)) {
            const VertexId from = dir == Direction::forward ? e.init : e.fin;
            const VertexId to = dir == Direction::forward ? e.fin : e.init;
            const auto lambda = S::from_real(e.lambda);
            const auto ge = max_order == 0 ? S::one() : detail::lift_g<S>(g[e.id]);
            for (unsigned m = 0; m <= max_order; ++m) {
                auto inner = S::zero();
                for (unsigned l = 0; l <= m; ++l)
                    inner = S::add(inner, nat_scale<S>(binom(m, l), S::mul(power<S>(ge, l), state.at(from, m - l))));
                state.set(to, m, S::add(state.at(to, m), S::mul(lambda, inner)));
            }
        }
    }
    return state;
}

} // namespace reference

} // namespace trellis
