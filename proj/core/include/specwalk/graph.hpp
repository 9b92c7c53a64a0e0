#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace specwalk {

using Vertex = std::int32_t;
using Edge = std::pair<Vertex, Vertex>;  // always stored with first < second

/// Immutable undirected simple graph in CSR form. No self-loops, no
/// duplicate edges; adjacency lists are sorted ascending.
class Graph {
 public:
  Graph() = default;

  /// Builds from a unique, loop-free edge set over vertices 0..n-1.
  /// Edges may be given in any order / orientation.
  Graph(Vertex n, const std::vector<Edge>& edges);

  Vertex num_vertices() const { return n_; }
  std::int64_t num_edges() const { return m_; }

  std::span<const Vertex> neighbors(Vertex v) const {
    return {adjacency_.data() + offsets_[v],
            adjacency_.data() + offsets_[v + 1]};
  }
  Vertex degree(Vertex v) const {
    return static_cast<Vertex>(offsets_[v + 1] - offsets_[v]);
  }
  bool has_edge(Vertex u, Vertex v) const;

  /// Edge list with u < v, lexicographically sorted.
  std::vector<Edge> edges() const;

  /// Content digest over (n, m, adjacency); identifies the graph for
  /// artifact staleness checks.
  std::uint64_t digest() const;

  /// Connected-component id per vertex (ids are 0-based, order of discovery).
  std::vector<int> component_ids() const;

 private:
  Vertex n_ = 0;
  std::int64_t m_ = 0;
  std::vector<std::int64_t> offsets_;
  std::vector<Vertex> adjacency_;
};

struct GraphLoadResult {
  Graph graph;
  std::vector<std::string> id_to_token;  // internal id -> original token
  std::int64_t dropped_self_loops = 0;
  std::int64_t dropped_duplicates = 0;
};

/// Parses an edge list: one edge per line, two whitespace-separated vertex
/// tokens, '#' comment lines and blank lines ignored. Tokens may be arbitrary
/// strings; vertices are renumbered to 0..n-1 in order of first appearance.
/// Self-loops and duplicate edges are dropped and counted.
GraphLoadResult load_edge_list(std::istream& in);
GraphLoadResult load_edge_list_file(const std::string& path);

/// Writes the canonical edge list (internal ids, u < v, sorted).
void save_edge_list(const Graph& g, std::ostream& out);
void save_edge_list_file(const Graph& g, const std::string& path);

void save_id_map(const std::vector<std::string>& id_to_token,
                 const std::string& path);
std::vector<std::string> load_id_map(const std::string& path);

/// Vertices within `hops` BFS rings of v, ring by ring, each ring ordered by
/// ascending id, truncated to the first `cap` entries. v itself is element 0.
std::vector<Vertex> khop_vertices(const Graph& g, Vertex v, int hops, int cap);

/// g minus the given edges (orientation-insensitive). Vertex set unchanged.
Graph remove_edges(const Graph& g, const std::vector<Edge>& removed);

}  // namespace specwalk
