#pragma once

#include <optional>
#include <string>
#include <vector>

namespace liftpm {

// Edge of a multigraph, oriented u -> v as stored in the input document.
struct Edge {
  int u = 0;
  int v = 0;
};

// Connected loop-free multigraph on vertices 0..g-1. Parallel edges are
// distinct entries of the edge list; the stored order fixes both the edge
// index and the orientation used by the directed incidence matrix.
class Multigraph {
 public:
  Multigraph(int g, std::vector<Edge> edges);

  // Parses {"g": <int>, "edges": [[i,j], ...]}.
  static Multigraph from_json(const std::string& text);
  static Multigraph from_file(const std::string& path);

  int vertex_count() const { return g_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[e]; }

  // Edge indices incident to v, ascending.
  const std::vector<int>& incident(int v) const { return incident_[v]; }
  int degree(int v) const { return static_cast<int>(incident_[v].size()); }

  // Degree if regular, nullopt otherwise.
  std::optional<int> regular_degree() const;

  // Two-coloring when bipartite (color per vertex, 0/1), nullopt otherwise.
  std::optional<std::vector<int>> bipartition() const;
  bool is_bipartite() const { return bipartition().has_value(); }

  // The endpoint of edge e other than v.
  int other_end(int e, int v) const {
    return edges_[e].u == v ? edges_[e].v : edges_[e].u;
  }

 private:
  int g_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> incident_;
};

// Named small graphs used throughout the test and acceptance suites.
Multigraph make_complete_graph(int g);
Multigraph make_parallel_edges(int multiplicity);  // two vertices, d parallel edges
Multigraph make_cycle(int g);
Multigraph make_path(int g);
Multigraph make_petersen();
Multigraph make_prism3();  // triangular prism, 3-regular on 6 vertices

}  // namespace liftpm
