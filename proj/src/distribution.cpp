#include "trellis/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <string>

#include "trellis/errors.hpp"

namespace trellis {

namespace {

constexpr double lattice_tolerance = 1e-9;

bool same_lattice(const Lattice& a, const Lattice& b)
{
    return a.step_units == b.step_units && std::abs(a.unit - b.unit) <= 1e-12 * std::max(a.unit, b.unit);
}

std::int64_t floor_div(std::int64_t a, std::int64_t b)
{
    const std::int64_t q = a / b;
    return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q;
}

double float_gcd(double a, double b, double tol)
{
    a = std::abs(a);
    b = std::abs(b);
    if (a < b) std::swap(a, b);
    while (b > tol) {
        double r = std::fmod(a, b);
        if (b - r <= tol) r = 0.0;
        a = b;
        b = r;
    }
    return a;
}

/// Runs `update` over every vertex layer by layer; the first exception
/// thrown by any worker is rethrown once the sweep is done.
template <class Update>
void sweep(const Trellis& trellis, Direction direction, int threads, Update&& update)
{
    std::exception_ptr failure;
    NoCount none;
    detail::for_each_layer_vertex(trellis, direction, threads, none, [&](VertexId v, NoCount&) {
        try {
            update(v);
        } catch (...) {
#pragma omp critical(trellis_distribution_failure)
            if (!failure) failure = std::current_exception();
        }
    });
    if (failure) std::rethrow_exception(failure);
}

double anchor_center(Anchor anchor, double mean, double reference, double width)
{
    if (anchor == Anchor::mean) return mean;
    return reference + std::round((mean - reference) / width) * width;
}

void add_into(QuantizedDistribution& acc, const QuantizedDistribution& d, double weight)
{
    for (std::size_t k = 0; k < acc.mass.size(); ++k) acc.mass[k] += weight * d.mass[k];
}

void check_symbol_depth(const Trellis& trellis, int depth)
{
    if (depth < 1 || depth > trellis.rank())
        throw Error("symbol depth " + std::to_string(depth) + " outside [1, " + std::to_string(trellis.rank()) + "]");
}

} // namespace

// ---------------------------------------------------------------------------
// ExactDistribution

std::int64_t ExactDistribution::to_units(double value) const
{
    const double q = value / lattice_.unit;
    const double r = std::round(q);
    if (!std::isfinite(q) || std::abs(q - r) > lattice_tolerance * std::max(1.0, std::abs(q)))
        throw Error("value " + std::to_string(value) + " is not on the lattice of unit " +
                    std::to_string(lattice_.unit));
    return static_cast<std::int64_t>(r);
}

ExactDistribution ExactDistribution::dirac(Lattice lattice, double at)
{
    ExactDistribution d(lattice);
    d.origin_ = d.to_units(at);
    d.mass_ = {1.0};
    return d;
}

ExactDistribution ExactDistribution::from_mass(Lattice lattice, std::int64_t origin_units, std::vector<double> mass)
{
    ExactDistribution d(lattice);
    d.origin_ = origin_units;
    d.mass_ = std::move(mass);
    return d;
}

double ExactDistribution::value(std::size_t k) const
{
    return static_cast<double>(origin_ + static_cast<std::int64_t>(k) * lattice_.step_units) * lattice_.unit;
}

double ExactDistribution::total() const
{
    double sum = 0.0;
    for (double m : mass_) sum += m;
    return sum;
}

double ExactDistribution::moment(unsigned m) const
{
    double sum = 0.0;
    for (std::size_t k = 0; k < mass_.size(); ++k) sum += std::pow(value(k), static_cast<double>(m)) * mass_[k];
    return sum;
}

double ExactDistribution::mass_at(double u) const
{
    if (mass_.empty()) return 0.0;
    const double q = u / lattice_.unit;
    const double r = std::round(q);
    if (std::abs(q - r) > lattice_tolerance * std::max(1.0, std::abs(q))) return 0.0;
    const auto rel = static_cast<std::int64_t>(r) - origin_;
    if (rel < 0 || rel % lattice_.step_units != 0) return 0.0;
    const auto k = static_cast<std::size_t>(rel / lattice_.step_units);
    return k < mass_.size() ? mass_[k] : 0.0;
}

ExactDistribution ExactDistribution::shifted(double b) const
{
    ExactDistribution out = *this;
    out.origin_ += to_units(b);
    return out;
}

ExactDistribution ExactDistribution::scaled(double factor) const
{
    ExactDistribution out = *this;
    for (double& m : out.mass_) m *= factor;
    return out;
}

ExactDistribution ExactDistribution::normalized() const
{
    const double t = total();
    return t == 0.0 ? *this : scaled(1.0 / t);
}

ExactDistribution ExactDistribution::padded(double lo, double hi) const
{
    const std::int64_t lo_units = to_units(lo);
    const std::int64_t hi_units = to_units(hi);
    const std::int64_t step = lattice_.step_units;
    ExactDistribution out(lattice_);
    if (mass_.empty()) {
        out.origin_ = lo_units;
        out.mass_.assign(static_cast<std::size_t>(std::max<std::int64_t>(floor_div(hi_units - lo_units, step) + 1, 0)),
                         0.0);
        return out;
    }
    const std::int64_t last = origin_ + static_cast<std::int64_t>(mass_.size() - 1) * step;
    const std::int64_t first_k = std::min<std::int64_t>(0, -floor_div(origin_ - lo_units, step));
    const std::int64_t last_k = std::max<std::int64_t>(static_cast<std::int64_t>(mass_.size()) - 1,
                                                       (static_cast<std::int64_t>(mass_.size()) - 1) +
                                                           floor_div(hi_units - last, step));
    out.origin_ = origin_ + first_k * step;
    out.mass_.assign(static_cast<std::size_t>(last_k - first_k + 1), 0.0);
    std::copy(mass_.begin(), mass_.end(), out.mass_.begin() + (-first_k));
    return out;
}

void ExactDistribution::accumulate(const ExactDistribution& other, double weight)
{
    if (!same_lattice(lattice_, other.lattice_)) throw Error("cannot add distributions on different lattices");
    if (other.mass_.empty()) return;
    if (mass_.empty()) {
        origin_ = other.origin_;
        mass_.resize(other.mass_.size());
        for (std::size_t k = 0; k < mass_.size(); ++k) mass_[k] = weight * other.mass_[k];
        return;
    }
    const std::int64_t step = lattice_.step_units;
    if ((other.origin_ - origin_) % step != 0) throw Error("cannot add distributions with offset lattices");
    const std::int64_t lo = std::min(origin_, other.origin_);
    const std::int64_t hi = std::max(origin_ + static_cast<std::int64_t>(mass_.size() - 1) * step,
                                     other.origin_ + static_cast<std::int64_t>(other.mass_.size() - 1) * step);
    if (lo != origin_ || hi != origin_ + static_cast<std::int64_t>(mass_.size() - 1) * step) {
        std::vector<double> grown(static_cast<std::size_t>((hi - lo) / step + 1), 0.0);
        std::copy(mass_.begin(), mass_.end(), grown.begin() + (origin_ - lo) / step);
        mass_ = std::move(grown);
        origin_ = lo;
    }
    const auto at = static_cast<std::size_t>((other.origin_ - origin_) / step);
    for (std::size_t k = 0; k < other.mass_.size(); ++k) mass_[at + k] += weight * other.mass_[k];
}

std::vector<std::pair<double, double>> ExactDistribution::points() const
{
    std::vector<std::pair<double, double>> out;
    out.reserve(mass_.size());
    for (std::size_t k = 0; k < mass_.size(); ++k) out.emplace_back(value(k), mass_[k]);
    return out;
}

ExactDistribution convolve(const ExactDistribution& a, const ExactDistribution& b)
{
    if (!same_lattice(a.lattice(), b.lattice())) throw Error("cannot convolve distributions with different steps");
    if (a.empty() || b.empty()) return ExactDistribution(a.lattice());
    std::vector<double> mass(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.mass()[i] == 0.0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) mass[i + j] += a.mass()[i] * b.mass()[j];
    }
    return ExactDistribution::from_mass(a.lattice(), a.origin_units() + b.origin_units(), std::move(mass));
}

// ---------------------------------------------------------------------------
// QuantizedDistribution

QuantizedDistribution QuantizedDistribution::dirac(int half_bins, double width, double at)
{
    auto d = zero(half_bins, width, at);
    d.mass[static_cast<std::size_t>(half_bins)] = 1.0;
    return d;
}

QuantizedDistribution QuantizedDistribution::zero(int half_bins, double width, double center)
{
    if (half_bins < 0) throw Error("negative number of half bins");
    if (!(width > 0.0)) throw Error("bin width must be positive");
    return {center, width, std::vector<double>(2 * static_cast<std::size_t>(half_bins) + 1, 0.0)};
}

double QuantizedDistribution::total() const
{
    double sum = 0.0;
    for (double m : mass) sum += m;
    return sum;
}

double QuantizedDistribution::moment(unsigned m) const
{
    double sum = 0.0;
    for (std::size_t k = 0; k < mass.size(); ++k) sum += std::pow(value(k), static_cast<double>(m)) * mass[k];
    return sum;
}

QuantizedDistribution QuantizedDistribution::shifted(double b) const
{
    QuantizedDistribution out = *this;
    out.center += b;
    return out;
}

QuantizedDistribution QuantizedDistribution::scaled(double factor) const
{
    QuantizedDistribution out = *this;
    for (double& m : out.mass) m *= factor;
    return out;
}

QuantizedDistribution QuantizedDistribution::normalized() const
{
    const double t = total();
    return t == 0.0 ? *this : scaled(1.0 / t);
}

std::vector<std::pair<double, double>> QuantizedDistribution::points() const
{
    std::vector<std::pair<double, double>> out;
    out.reserve(mass.size());
    for (std::size_t k = 0; k < mass.size(); ++k) out.emplace_back(value(k), mass[k]);
    return out;
}

QuantizedDistribution redistribute(const QuantizedDistribution& d, double delta_mu, int out_half_bins)
{
    auto out = QuantizedDistribution::zero(out_half_bins, d.width, d.center + delta_mu);
    double q = delta_mu / d.width;
    if (std::abs(q - std::round(q)) <= 1e-9) q = std::round(q);
    const double shift = std::floor(q);
    const double eps = q - shift;
    const double n_in = d.half_bins();
    const double n_out = out_half_bins;
    auto put = [&](double j, double m) {
        const double k = std::clamp(j, -n_out, n_out);
        out.mass[static_cast<std::size_t>(k + n_out)] += m;
    };
    for (std::size_t k = 0; k < d.mass.size(); ++k) {
        const double m = d.mass[k];
        if (m == 0.0) continue;
        const double j = static_cast<double>(k) - n_in;
        if (eps == 0.0) {
            put(j - shift, m);
        } else {
            put(j - shift - 1.0, eps * m);
            put(j - shift, (1.0 - eps) * m);
        }
    }
    return out;
}

QuantizedDistribution redistribute(const QuantizedDistribution& d, double delta_mu)
{
    return redistribute(d, delta_mu, d.half_bins());
}

QuantizedDistribution convolve(const QuantizedDistribution& a, const QuantizedDistribution& b)
{
    if (std::abs(a.width - b.width) > 1e-12 * std::max(a.width, b.width))
        throw Error("cannot convolve binned distributions of different bin widths");
    QuantizedDistribution out{a.center + b.center, a.width, std::vector<double>(a.mass.size() + b.mass.size() - 1, 0.0)};
    for (std::size_t i = 0; i < a.mass.size(); ++i) {
        if (a.mass[i] == 0.0) continue;
        for (std::size_t j = 0; j < b.mass.size(); ++j) out.mass[i + j] += a.mass[i] * b.mass[j];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Domains and parameters

std::optional<Lattice> detect_lattice(const Trellis& trellis, const DepthFunctionTable& g, std::size_t max_points)
{
    g.require_defined(trellis);
    double scale = 0.0;
    for (double x : g.values()) scale = std::max(scale, std::abs(x));
    if (scale == 0.0) return Lattice{};
    const double tol = 1e-9 * scale;

    double unit = 0.0;
    for (double x : g.values())
        if (std::abs(x) > tol) unit = unit == 0.0 ? std::abs(x) : float_gcd(unit, x, tol);
    double step = 0.0;
    for (int i = 1; i <= trellis.rank(); ++i) {
        const auto section = trellis.section(i);
        if (section.empty()) continue;
        const double first = g[section.front().id];
        for (const Edge& e : section) {
            const double diff = g[e.id] - first;
            if (std::abs(diff) > tol) step = step == 0.0 ? std::abs(diff) : float_gcd(step, diff, tol);
        }
    }
    if (!(unit > tol)) return std::nullopt;
    for (double x : g.values()) {
        const double q = x / unit;
        if (std::abs(q - std::round(q)) > 1e-6) return std::nullopt;
    }
    std::int64_t step_units = 1;
    if (step > 0.0) {
        const double q = step / unit;
        if (std::abs(q - std::round(q)) > 1e-6) return std::nullopt;
        step_units = static_cast<std::int64_t>(std::round(q));
    }
    const Lattice lattice{unit, step_units};
    const auto [lo, hi] = symmetric_domain(trellis, g);
    if ((hi - lo) / lattice.step() + 1.0 > static_cast<double>(max_points)) return std::nullopt;
    return lattice;
}

std::pair<double, double> symmetric_domain(const Trellis& trellis, const DepthFunctionTable& g)
{
    double bound = 0.0;
    for (int i = 1; i <= trellis.rank(); ++i) {
        double largest = 0.0;
        for (const Edge& e : trellis.section(i)) largest = std::max(largest, std::abs(g[e.id]));
        bound += largest;
    }
    return {-bound, bound};
}

std::pair<double, double> natural_domain(const Trellis& trellis, const DepthFunctionTable& g)
{
    double lo = 0.0;
    double hi = 0.0;
    for (int i = 1; i <= trellis.rank(); ++i) {
        const auto section = trellis.section(i);
        if (section.empty()) continue;
        double smin = std::numeric_limits<double>::infinity();
        double smax = -smin;
        for (const Edge& e : section) {
            smin = std::min(smin, g[e.id]);
            smax = std::max(smax, g[e.id]);
        }
        lo += smin;
        hi += smax;
    }
    return {lo, hi};
}

QuantizationParams default_quantization(const Trellis& trellis, const DepthFunctionTable& g)
{
    double mean = 0.0;
    double second = 0.0;
    try {
        const auto state = normalized_states(trellis, g, 2, Direction::forward);
        mean = state.moment(trellis.sink(), 1);
        second = state.moment(trellis.sink(), 2);
    } catch (const Error&) {
        const auto moments = trellis_moments<RealSemiring>(trellis, forward_numerators<RealSemiring>(trellis, g, 2));
        if (!moments.normalized) throw Error("cannot choose bin width: trellis flow is zero");
        mean = (*moments.normalized)[1];
        second = (*moments.normalized)[2];
    }
    const double sigma = std::sqrt(std::max(second - mean * mean, 0.0));
    QuantizationParams params;
    params.bin_width = sigma > 0.0 ? 4.0 * sigma / params.half_bins : 1.0;
    return params;
}

// ---------------------------------------------------------------------------
// Exact propagation

ExactState exact_distributions(const Trellis& trellis, const DepthFunctionTable& g, Direction direction,
                               RunOptions options)
{
    const auto lattice = detect_lattice(trellis, g);
    if (!lattice) throw Error("g values share no common lattice; exact distributions unavailable");
    return exact_distributions(trellis, g, *lattice, direction, options);
}

ExactState exact_distributions(const Trellis& trellis, const DepthFunctionTable& g, const Lattice& lattice,
                               Direction direction, RunOptions options)
{
    require_valid(trellis);
    g.require_defined(trellis);
    ExactState state;
    state.direction = direction;
    state.lattice = lattice;
    state.domain = symmetric_domain(trellis, g);
    state.at.assign(trellis.num_vertices(), ExactDistribution(lattice));
    const bool forward = direction == Direction::forward;
    state.at[forward ? trellis.source() : trellis.sink()] = ExactDistribution::dirac(lattice);

    sweep(trellis, direction, options.threads, [&](VertexId v) {
        ExactDistribution acc(lattice);
        for (EdgeId eid : forward ? trellis.incoming(v) : trellis.outgoing(v)) {
            const Edge& e = trellis.edge(eid);
            acc.accumulate(state.at[forward ? e.init : e.fin].shifted(g[eid]), e.lambda);
        }
        state.at[v] = std::move(acc);
    });
    return state;
}

ExactDistribution trellis_distribution(const Trellis& trellis, const ExactState& forward, const ExactState& backward,
                                       int cut)
{
    if (cut < 0 || cut > trellis.rank())
        throw Error("cut depth " + std::to_string(cut) + " outside [0, " + std::to_string(trellis.rank()) + "]");
    ExactDistribution acc(forward.lattice);
    for (VertexId v : trellis.layer(cut)) acc.accumulate(convolve(forward.at[v], backward.at[v]));
    return acc.padded(forward.domain.first, forward.domain.second);
}

ExactDistribution symbol_distribution(const Trellis& trellis, const DepthFunctionTable& g, const ExactState& forward,
                                      const ExactState& backward, int depth, double symbol)
{
    check_symbol_depth(trellis, depth);
    ExactDistribution acc(forward.lattice);
    for (const Edge& e : trellis.section(depth)) {
        if (e.clabel != symbol) continue;
        acc.accumulate(convolve(forward.at[e.init].shifted(g[e.id]), backward.at[e.fin]), e.lambda);
    }
    return acc.padded(forward.domain.first, forward.domain.second);
}

// ---------------------------------------------------------------------------
// Quantized propagation

QuantizedState quantized_distributions(const Trellis& trellis, const DepthFunctionTable& g, Direction direction,
                                       const QuantizationParams& params, RunOptions options)
{
    require_valid(trellis);
    g.require_defined(trellis);
    if (params.half_bins < 1) throw Error("quantization needs at least one half bin");
    if (!(params.bin_width > 0.0) || !std::isfinite(params.bin_width)) throw Error("bin width must be positive");

    const int n_bins = params.half_bins;
    const double width = params.bin_width;
    QuantizedState state;
    state.direction = direction;
    state.params = params;
    state.at.assign(trellis.num_vertices(), QuantizedDistribution::zero(n_bins, width));
    state.mean.assign(trellis.num_vertices(), 0.0);
    const bool forward = direction == Direction::forward;
    state.at[forward ? trellis.source() : trellis.sink()] = QuantizedDistribution::dirac(n_bins, width);

    sweep(trellis, direction, options.threads, [&](VertexId v) {
        const auto edges = forward ? trellis.incoming(v) : trellis.outgoing(v);
        double total = 0.0;
        double weighted = 0.0;
        std::optional<double> reference;
        for (EdgeId eid : edges) {
            const Edge& e = trellis.edge(eid);
            const VertexId u = forward ? e.init : e.fin;
            const double w = e.lambda * state.at[u].total();
            if (w == 0.0) continue;
            total += w;
            weighted += w * (state.mean[u] + g[eid]);
            if (!reference) reference = state.at[u].center + g[eid];
        }
        if (!(total > 0.0) || !std::isfinite(total))
            throw Error("zero incoming weight at vertex " + std::to_string(v) + " (depth " +
                        std::to_string(trellis.depth(v)) + "); quantized distribution undefined");
        const double mean = weighted / total;
        const double center = anchor_center(params.anchor, mean, *reference, width);
        auto acc = QuantizedDistribution::zero(n_bins, width, center);
        for (EdgeId eid : edges) {
            const Edge& e = trellis.edge(eid);
            const auto& src = state.at[forward ? e.init : e.fin];
            if (e.lambda == 0.0) continue;
            add_into(acc, redistribute(src, center - (src.center + g[eid]), n_bins), e.lambda);
        }
        state.at[v] = std::move(acc);
        state.mean[v] = mean;
    });
    return state;
}

namespace {

struct Contribution {
    QuantizedDistribution joined; // un-rebinned convolution, already carrying its mass
    double mean;
    double weight;
};

QuantizedDistribution combine(const std::vector<Contribution>& parts, const QuantizationParams& params)
{
    double total = 0.0;
    double weighted = 0.0;
    const Contribution* reference = nullptr;
    for (const auto& part : parts) {
        if (part.weight == 0.0) continue;
        total += part.weight;
        weighted += part.weight * part.mean;
        if (!reference) reference = &part;
    }
    if (!reference) return QuantizedDistribution::zero(params.half_bins, params.bin_width);
    const double mean = weighted / total;
    const double center = anchor_center(params.anchor, mean, reference->joined.center, params.bin_width);
    auto acc = QuantizedDistribution::zero(params.half_bins, params.bin_width, center);
    for (const auto& part : parts)
        add_into(acc, redistribute(part.joined, center - part.joined.center, params.half_bins), 1.0);
    return acc;
}

} // namespace

QuantizedDistribution trellis_distribution(const Trellis& trellis, const QuantizedState& forward,
                                           const QuantizedState& backward, int cut)
{
    if (cut < 0 || cut > trellis.rank())
        throw Error("cut depth " + std::to_string(cut) + " outside [0, " + std::to_string(trellis.rank()) + "]");
    std::vector<Contribution> parts;
    for (VertexId v : trellis.layer(cut)) {
        const auto& a = forward.at[v];
        const auto& b = backward.at[v];
        parts.push_back({convolve(a, b), forward.mean[v] + backward.mean[v], a.total() * b.total()});
    }
    return combine(parts, forward.params);
}

QuantizedDistribution symbol_distribution(const Trellis& trellis, const DepthFunctionTable& g,
                                          const QuantizedState& forward, const QuantizedState& backward, int depth,
                                          double symbol)
{
    check_symbol_depth(trellis, depth);
    std::vector<Contribution> parts;
    for (const Edge& e : trellis.section(depth)) {
        if (e.clabel != symbol) continue;
        const auto& a = forward.at[e.init];
        const auto& b = backward.at[e.fin];
        parts.push_back({convolve(a.shifted(g[e.id]), b).scaled(e.lambda),
                         forward.mean[e.init] + g[e.id] + backward.mean[e.fin], e.lambda * a.total() * b.total()});
    }
    return combine(parts, forward.params);
}

} // namespace trellis
