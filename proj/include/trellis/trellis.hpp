#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace trellis {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;

/// A labeled edge from depth d-1 to depth d. `lambda` is stored in the real
/// weight domain and lifted into a semiring carrier by the engines; `clabel`
/// is the code symbol.
struct Edge {
    EdgeId id = 0;
    VertexId init = 0;
    VertexId fin = 0;
    double lambda = 1.0;
    double clabel = 0.0;
};

struct Degrees {
    std::size_t in = 0;  // rho^-(v)
    std::size_t out = 0; // rho^+(v)
};

/// Half-open range of dense vertex ids forming one depth layer.
struct VertexRange {
    VertexId first = 0;
    VertexId last = 0;

    std::size_t size() const { return last - first; }
    bool empty() const { return first == last; }

    struct iterator {
        VertexId v;
        VertexId operator*() const { return v; }
        iterator& operator++()
        {
            ++v;
            return *this;
        }
        bool operator==(const iterator&) const = default;
    };
    iterator begin() const { return {first}; }
    iterator end() const { return {last}; }
};

/**
 * Depth-layered directed graph with a single source at depth 0 and a single
 * sink at depth `rank()`.
 *
 * Vertex and edge ids are dense and assigned layer by layer: vertices are
 * ordered by depth, edges by the depth of their final vertex. Parallel edges
 * are allowed. A Trellis can hold structurally invalid graphs so that
 * `validate` can report on them; the engines call `require_valid` first.
 */
class Trellis {
public:
    Trellis() = default;

    int rank() const { return rank_; }
    std::size_t num_vertices() const { return depth_.size(); }
    std::size_t num_edges() const { return edges_.size(); }

    int depth(VertexId v) const { return depth_.at(v); }
    VertexRange layer(int i) const;

    std::span<const Edge> edges() const { return edges_; }
    const Edge& edge(EdgeId e) const { return edges_.at(e); }

    /// Edges whose final vertex lies at depth i (E_{i-1,i} for valid trellises).
    std::span<const Edge> section(int i) const;

    std::span<const EdgeId> incoming(VertexId v) const;
    std::span<const EdgeId> outgoing(VertexId v) const;
    Degrees degrees(VertexId v) const;

    /// First vertex at depth 0 / depth rank(); meaningful on valid trellises.
    VertexId source() const { return 0; }
    VertexId sink() const { return static_cast<VertexId>(num_vertices() - 1); }

    /// Copy with replaced lambda labels (indexed by edge id).
    Trellis with_lambdas(std::span<const double> lambdas) const;
    Trellis with_clabels(std::span<const double> clabels) const;

    bool same_structure(const Trellis& other) const;

private:
    friend class TrellisBuilder;

    void index();

    int rank_ = 0;
    std::vector<int> depth_;
    std::vector<Edge> edges_;
    std::vector<std::size_t> layer_offsets_;   // rank+2 entries
    std::vector<std::size_t> section_offsets_; // rank+2 entries
    std::vector<std::size_t> in_offsets_;
    std::vector<EdgeId> in_edges_;
    std::vector<std::size_t> out_offsets_;
    std::vector<EdgeId> out_edges_;
};

/// Collects vertices and edges in any order and produces a Trellis with
/// dense, layer-ordered ids. Handles returned by add_vertex are provisional.
class TrellisBuilder {
public:
    explicit TrellisBuilder(int rank);

    VertexId add_vertex(int depth);
    EdgeId add_edge(VertexId init, VertexId fin, double lambda, double clabel);

    /// Final id of each provisional vertex handle, valid after build().
    const std::vector<VertexId>& vertex_map() const { return vertex_map_; }
    const std::vector<EdgeId>& edge_map() const { return edge_map_; }

    Trellis build();

private:
    int rank_;
    std::vector<int> depths_;
    std::vector<Edge> edges_;
    std::vector<VertexId> vertex_map_;
    std::vector<EdgeId> edge_map_;
};

enum class ViolationKind {
    missing_source,
    multiple_sources,
    missing_sink,
    multiple_sinks,
    empty_layer,
    depth_skip,
    unreachable_vertex,
    dead_end_vertex,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
    ViolationKind kind;
    std::uint32_t subject; // vertex id, edge id or depth, depending on kind
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    bool has(ViolationKind kind) const;
    std::string to_string() const;
};

ValidationReport validate(const Trellis& trellis);

/// Throws InvalidTrellis carrying the report when validation fails.
void require_valid(const Trellis& trellis);

using Path = std::vector<EdgeId>;

inline constexpr std::size_t default_path_cap = std::size_t{1} << 20;

/// Every path from u to v, each exactly once. A vertex reaches itself by the
/// empty path. Throws PathCapExceeded once more than `cap` paths exist.
std::vector<Path> enumerate_paths(const Trellis& trellis, VertexId u, VertexId v,
                                  std::size_t cap = default_path_cap);

/// Replaces every edge by a chain of `symbols_per_edge` edges, one symbol
/// each, through fresh intermediate vertices. The first chain edge keeps the
/// original lambda; the others get weight 1 (the multiplicative identity in
/// every semiring lift).
Trellis split_multi_symbol_edges(const Trellis& trellis, std::size_t symbols_per_edge,
                                 std::span<const std::vector<double>> symbol_table);

} // namespace trellis
