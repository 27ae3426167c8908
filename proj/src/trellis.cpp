#include "trellis/trellis.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "trellis/errors.hpp"

namespace trellis {

VertexRange Trellis::layer(int i) const
{
    if (i < 0 || i > rank_) return {};
    return {static_cast<VertexId>(layer_offsets_[i]), static_cast<VertexId>(layer_offsets_[i + 1])};
}

std::span<const Edge> Trellis::section(int i) const
{
    if (i < 0 || i > rank_) return {};
    const std::span<const Edge> all{edges_};
    return all.subspan(section_offsets_[i], section_offsets_[i + 1] - section_offsets_[i]);
}

std::span<const EdgeId> Trellis::incoming(VertexId v) const
{
    const std::span<const EdgeId> all{in_edges_};
    return all.subspan(in_offsets_.at(v), in_offsets_[v + 1] - in_offsets_[v]);
}

std::span<const EdgeId> Trellis::outgoing(VertexId v) const
{
    const std::span<const EdgeId> all{out_edges_};
    return all.subspan(out_offsets_.at(v), out_offsets_[v + 1] - out_offsets_[v]);
}

Degrees Trellis::degrees(VertexId v) const
{
    if (v >= num_vertices()) throw Error("unknown vertex " + std::to_string(v));
    return {incoming(v).size(), outgoing(v).size()};
}

Trellis Trellis::with_lambdas(std::span<const double> lambdas) const
{
    if (lambdas.size() != edges_.size()) throw Error("lambda label count does not match edge count");
    Trellis copy = *this;
    for (auto& e : copy.edges_) e.lambda = lambdas[e.id];
    return copy;
}

Trellis Trellis::with_clabels(std::span<const double> clabels) const
{
    if (clabels.size() != edges_.size()) throw Error("c-label count does not match edge count");
    Trellis copy = *this;
    for (auto& e : copy.edges_) e.clabel = clabels[e.id];
    return copy;
}

bool Trellis::same_structure(const Trellis& other) const
{
    if (rank_ != other.rank_ || depth_ != other.depth_ || edges_.size() != other.edges_.size()) return false;
    for (std::size_t k = 0; k < edges_.size(); ++k) {
        const Edge& a = edges_[k];
        const Edge& b = other.edges_[k];
        if (a.init != b.init || a.fin != b.fin) return false;
    }
    return true;
}

void Trellis::index()
{
    const auto n_vertices = depth_.size();
    const auto layers = static_cast<std::size_t>(rank_) + 2;

    layer_offsets_.assign(layers, 0);
    for (int d : depth_) ++layer_offsets_[static_cast<std::size_t>(d) + 1];
    std::partial_sum(layer_offsets_.begin(), layer_offsets_.end(), layer_offsets_.begin());

    section_offsets_.assign(layers, 0);
    for (const Edge& e : edges_) ++section_offsets_[static_cast<std::size_t>(depth_[e.fin]) + 1];
    std::partial_sum(section_offsets_.begin(), section_offsets_.end(), section_offsets_.begin());

    in_offsets_.assign(n_vertices + 1, 0);
    out_offsets_.assign(n_vertices + 1, 0);
    for (const Edge& e : edges_) {
        ++in_offsets_[e.fin + 1];
        ++out_offsets_[e.init + 1];
    }
    std::partial_sum(in_offsets_.begin(), in_offsets_.end(), in_offsets_.begin());
    std::partial_sum(out_offsets_.begin(), out_offsets_.end(), out_offsets_.begin());

    in_edges_.resize(edges_.size());
    out_edges_.resize(edges_.size());
    std::vector<std::size_t> in_fill(in_offsets_.begin(), in_offsets_.end() - 1);
    std::vector<std::size_t> out_fill(out_offsets_.begin(), out_offsets_.end() - 1);
    for (const Edge& e : edges_) {
        in_edges_[in_fill[e.fin]++] = e.id;
        out_edges_[out_fill[e.init]++] = e.id;
    }
}

TrellisBuilder::TrellisBuilder(int rank) : rank_(rank)
{
    if (rank < 0) throw Error("trellis rank must be nonnegative");
}

VertexId TrellisBuilder::add_vertex(int depth)
{
    if (depth < 0 || depth > rank_)
        throw Error("vertex depth " + std::to_string(depth) + " outside [0, " + std::to_string(rank_) + "]");
    depths_.push_back(depth);
    return static_cast<VertexId>(depths_.size() - 1);
}

EdgeId TrellisBuilder::add_edge(VertexId init, VertexId fin, double lambda, double clabel)
{
    if (init >= depths_.size() || fin >= depths_.size())
        throw Error("edge refers to an unknown vertex");
    if (depths_[fin] <= depths_[init]) throw Error("edge must point to a deeper vertex");
    edges_.push_back({static_cast<EdgeId>(edges_.size()), init, fin, lambda, clabel});
    return edges_.back().id;
}

Trellis TrellisBuilder::build()
{
    std::vector<VertexId> order(depths_.size());
    std::iota(order.begin(), order.end(), VertexId{0});
    std::stable_sort(order.begin(), order.end(), [&](VertexId a, VertexId b) { return depths_[a] < depths_[b]; });

    vertex_map_.assign(depths_.size(), 0);
    Trellis t;
    t.rank_ = rank_;
    t.depth_.reserve(depths_.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        vertex_map_[order[k]] = static_cast<VertexId>(k);
        t.depth_.push_back(depths_[order[k]]);
    }

    std::vector<Edge> edges = edges_;
    for (auto& e : edges) {
        e.init = vertex_map_[e.init];
        e.fin = vertex_map_[e.fin];
    }
    std::stable_sort(edges.begin(), edges.end(),
                     [&](const Edge& a, const Edge& b) { return t.depth_[a.fin] < t.depth_[b.fin]; });
    edge_map_.assign(edges.size(), 0);
    for (std::size_t k = 0; k < edges.size(); ++k) {
        edge_map_[edges[k].id] = static_cast<EdgeId>(k);
        edges[k].id = static_cast<EdgeId>(k);
    }
    t.edges_ = std::move(edges);
    t.index();
    return t;
}

std::string_view to_string(ViolationKind kind)
{
    switch (kind) {
    case ViolationKind::missing_source: return "missing source";
    case ViolationKind::multiple_sources: return "multiple sources";
    case ViolationKind::missing_sink: return "missing sink";
    case ViolationKind::multiple_sinks: return "multiple sinks";
    case ViolationKind::empty_layer: return "empty layer";
    case ViolationKind::depth_skip: return "depth-skip";
    case ViolationKind::unreachable_vertex: return "unreachable vertex";
    case ViolationKind::dead_end_vertex: return "dead-end vertex";
    }
    return "unknown";
}

bool ValidationReport::has(ViolationKind kind) const
{
    return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == kind; });
}

std::string ValidationReport::to_string() const
{
    std::ostringstream out;
    for (const auto& v : violations) out << trellis::to_string(v.kind) << ": " << v.message << '\n';
    return out.str();
}

ValidationReport validate(const Trellis& t)
{
    ValidationReport report;
    auto add = [&](ViolationKind kind, std::uint32_t subject, std::string message) {
        report.violations.push_back({kind, subject, std::move(message)});
    };

    const int n = t.rank();
    const auto sources = t.layer(0).size();
    const auto sinks = t.layer(n).size();
    if (sources == 0) add(ViolationKind::missing_source, 0, "no vertex at depth 0");
    if (sources > 1) add(ViolationKind::multiple_sources, 0, std::to_string(sources) + " vertices at depth 0");
    if (n > 0) {
        if (sinks == 0) add(ViolationKind::missing_sink, static_cast<std::uint32_t>(n), "no vertex at depth " + std::to_string(n));
        if (sinks > 1)
            add(ViolationKind::multiple_sinks, static_cast<std::uint32_t>(n),
                std::to_string(sinks) + " vertices at depth " + std::to_string(n));
    }
    for (int i = 1; i < n; ++i)
        if (t.layer(i).empty()) add(ViolationKind::empty_layer, static_cast<std::uint32_t>(i), "no vertex at depth " + std::to_string(i));

    for (const Edge& e : t.edges())
        if (t.depth(e.fin) != t.depth(e.init) + 1)
            add(ViolationKind::depth_skip, e.id,
                "edge " + std::to_string(e.id) + " joins depth " + std::to_string(t.depth(e.init)) + " to depth " +
                    std::to_string(t.depth(e.fin)));

    // Vertices are depth-ordered, so one sweep in each direction suffices.
    const auto nv = t.num_vertices();
    std::vector<char> reached(nv, 0);
    std::vector<char> coreached(nv, 0);
    for (VertexId v : t.layer(0)) reached[v] = 1;
    for (VertexId v : t.layer(n)) coreached[v] = 1;
    for (VertexId v = 0; v < nv; ++v)
        for (EdgeId e : t.incoming(v))
            if (reached[t.edge(e).init]) reached[v] = 1;
    for (VertexId v = static_cast<VertexId>(nv); v-- > 0;)
        for (EdgeId e : t.outgoing(v))
            if (coreached[t.edge(e).fin]) coreached[v] = 1;

    for (VertexId v = 0; v < nv; ++v) {
        if (!reached[v])
            add(ViolationKind::unreachable_vertex, v,
                "vertex " + std::to_string(v) + " at depth " + std::to_string(t.depth(v)) + " has no path from the source");
        if (!coreached[v])
            add(ViolationKind::dead_end_vertex, v,
                "vertex " + std::to_string(v) + " at depth " + std::to_string(t.depth(v)) + " has no path to the sink");
    }
    return report;
}

void require_valid(const Trellis& trellis)
{
    auto report = validate(trellis);
    if (!report.ok()) throw InvalidTrellis("invalid trellis: " + report.violations.front().message);
}

std::vector<Path> enumerate_paths(const Trellis& t, VertexId u, VertexId v, std::size_t cap)
{
    if (u >= t.num_vertices() || v >= t.num_vertices()) throw Error("unknown vertex");
    if (t.depth(u) > t.depth(v)) throw Error("path enumeration requires depth(u) <= depth(v)");

    std::vector<Path> paths;
    Path current;
    const int target_depth = t.depth(v);
    auto walk = [&](auto&& self, VertexId at) -> void {
        if (at == v) {
            if (paths.size() == cap)
                throw PathCapExceeded("more than " + std::to_string(cap) + " paths between vertices");
            paths.push_back(current);
            return;
        }
        if (t.depth(at) >= target_depth) return;
        for (EdgeId e : t.outgoing(at)) {
            current.push_back(e);
            self(self, t.edge(e).fin);
            current.pop_back();
        }
    };
    walk(walk, u);
    return paths;
}

Trellis split_multi_symbol_edges(const Trellis& t, std::size_t c, std::span<const std::vector<double>> symbol_table)
{
    if (c == 0) throw Error("symbols per edge must be at least 1");
    if (symbol_table.size() != t.num_edges()) throw Error("symbol table must have one entry per edge");
    for (const auto& symbols : symbol_table)
        if (symbols.size() != c)
            throw Error("edge carries " + std::to_string(symbols.size()) + " symbols, expected " + std::to_string(c));

    const int stretch = static_cast<int>(c);
    TrellisBuilder b(t.rank() * stretch);
    std::vector<VertexId> original(t.num_vertices());
    for (VertexId v = 0; v < t.num_vertices(); ++v) original[v] = b.add_vertex(t.depth(v) * stretch);

    for (const Edge& e : t.edges()) {
        const int base = t.depth(e.init) * stretch;
        VertexId from = original[e.init];
        for (std::size_t k = 0; k < c; ++k) {
            const VertexId to = (k + 1 == c) ? original[e.fin] : b.add_vertex(base + static_cast<int>(k) + 1);
            b.add_edge(from, to, k == 0 ? e.lambda : 1.0, symbol_table[e.id][k]);
            from = to;
        }
    }
    return b.build();
}

} // namespace trellis
