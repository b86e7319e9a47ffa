#include "liftpm/multigraph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "liftpm/errors.hpp"

namespace liftpm {

Multigraph::Multigraph(int g, std::vector<Edge> edges) : g_(g), edges_(std::move(edges)) {
  if (g_ <= 0) throw validation_error("vertex count must be positive");
  incident_.assign(g_, {});
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto& [u, v] = edges_[e];
    if (u < 0 || u >= g_ || v < 0 || v >= g_)
      throw validation_error("edge " + std::to_string(e) + " has a vertex out of range");
    if (u == v) throw validation_error("edge " + std::to_string(e) + " is a loop");
    incident_[u].push_back(static_cast<int>(e));
    incident_[v].push_back(static_cast<int>(e));
  }
  // connectivity
  std::vector<char> seen(g_, 0);
  std::deque<int> queue{0};
  seen[0] = 1;
  int reached = 1;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int e : incident_[v]) {
      const int w = other_end(e, v);
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        queue.push_back(w);
      }
    }
  }
  if (reached != g_) throw validation_error("graph is not connected");
}

Multigraph Multigraph::from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("graph document is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("g") || !doc.contains("edges"))
    throw validation_error("graph document must contain keys \"g\" and \"edges\"");
  if (!doc["g"].is_number_integer()) throw validation_error("\"g\" must be an integer");
  const int g = doc["g"].get<int>();
  std::vector<Edge> edges;
  for (const auto& item : doc["edges"]) {
    if (!item.is_array() || item.size() != 2 || !item[0].is_number_integer() ||
        !item[1].is_number_integer())
      throw validation_error("every edge must be a pair of integers");
    edges.push_back(Edge{item[0].get<int>(), item[1].get<int>()});
  }
  return Multigraph(g, std::move(edges));
}

Multigraph Multigraph::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open graph file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

std::optional<int> Multigraph::regular_degree() const {
  const int d = degree(0);
  for (int v = 1; v < g_; ++v)
    if (degree(v) != d) return std::nullopt;
  return d;
}

std::optional<std::vector<int>> Multigraph::bipartition() const {
  std::vector<int> color(g_, -1);
  std::deque<int> queue{0};
  color[0] = 0;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int e : incident_[v]) {
      const int w = other_end(e, v);
      if (color[w] == -1) {
        color[w] = 1 - color[v];
        queue.push_back(w);
      } else if (color[w] == color[v]) {
        return std::nullopt;
      }
    }
  }
  return color;
}

Multigraph make_complete_graph(int g) {
  std::vector<Edge> edges;
  for (int u = 0; u < g; ++u)
    for (int v = u + 1; v < g; ++v) edges.push_back({u, v});
  return Multigraph(g, std::move(edges));
}

Multigraph make_parallel_edges(int multiplicity) {
  std::vector<Edge> edges(multiplicity, Edge{0, 1});
  return Multigraph(2, std::move(edges));
}

Multigraph make_cycle(int g) {
  std::vector<Edge> edges;
  for (int v = 0; v < g; ++v) edges.push_back({v, (v + 1) % g});
  return Multigraph(g, std::move(edges));
}

Multigraph make_path(int g) {
  std::vector<Edge> edges;
  for (int v = 0; v + 1 < g; ++v) edges.push_back({v, v + 1});
  return Multigraph(g, std::move(edges));
}

Multigraph make_petersen() {
  std::vector<Edge> edges;
  for (int v = 0; v < 5; ++v) edges.push_back({v, (v + 1) % 5});        // outer 5-cycle
  for (int v = 0; v < 5; ++v) edges.push_back({v, v + 5});              // spokes
  for (int v = 0; v < 5; ++v) edges.push_back({5 + v, 5 + (v + 2) % 5});  // inner pentagram
  return Multigraph(10, std::move(edges));
}

Multigraph make_prism3() {
  std::vector<Edge> edges = {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5},
                             {0, 3}, {1, 4}, {2, 5}};
  return Multigraph(6, std::move(edges));
}

}  // namespace liftpm
