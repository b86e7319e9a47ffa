#include "liftpm/lift_sim.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <numeric>
#include <thread>
#include <unordered_map>

#include "liftpm/errors.hpp"
#include "liftpm/matrices.hpp"
#include "liftpm/nb_walks.hpp"
#include "liftpm/rng.hpp"

namespace liftpm {

CountGraph::CountGraph(int vertices) : n_(vertices), adj_(vertices) {
  if (vertices > 128)
    throw budget_error("matching counter supports at most 128 vertices, got " +
                       std::to_string(vertices));
}

void CountGraph::add_edge(int u, int v, long multiplicity) {
  if (u == v) throw validation_error("matching counter rejects loops");
  for (auto& [w, m] : adj_[u])
    if (w == v) {
      m += multiplicity;
      for (auto& [w2, m2] : adj_[v])
        if (w2 == u) m2 += multiplicity;
      return;
    }
  adj_[u].push_back({v, multiplicity});
  adj_[v].push_back({u, multiplicity});
}

long CountGraph::multiplicity(int u, int v) const {
  for (const auto& [w, m] : adj_[u])
    if (w == v) return m;
  return 0;
}

long CountGraph::total_edges() const {
  long total = 0;
  for (int v = 0; v < n_; ++v)
    for (const auto& [w, m] : adj_[v]) total += m;
  return total / 2;
}

namespace {

using u128 = unsigned __int128;

struct Mask {
  std::uint64_t lo = 0, hi = 0;
  bool operator==(const Mask&) const = default;
  bool test(int i) const { return ((i < 64 ? lo >> i : hi >> (i - 64)) & 1u) != 0; }
  void set(int i) { (i < 64 ? lo : hi) |= (1ull << (i & 63)); }
  void clear(int i) { (i < 64 ? lo : hi) &= ~(1ull << (i & 63)); }
  bool empty() const { return lo == 0 && hi == 0; }
  int popcount() const { return __builtin_popcountll(lo) + __builtin_popcountll(hi); }
  int lowest() const {
    return lo ? __builtin_ctzll(lo) : 64 + __builtin_ctzll(hi);
  }
  Mask minus(const Mask& o) const { return {lo & ~o.lo, hi & ~o.hi}; }
};

struct MaskHash {
  std::size_t operator()(const Mask& m) const {
    return mix64(m.lo ^ (m.hi * 0x9E3779B97F4A7C15ull));
  }
};

class PmCounter {
 public:
  explicit PmCounter(const CountGraph& g) : g_(g) {}

  u128 count(Mask active) {
    if (active.empty()) return 1;
    if (auto it = memo_.find(active); it != memo_.end()) return it->second;
    const u128 result = compute(active);
    memo_.emplace(active, result);
    return result;
  }

 private:
  u128 compute(Mask active) {
    // forced moves and dead ends
    int best = -1, best_nbrs = 1 << 30;
    for (int v = 0; v < g_.vertex_count(); ++v) {
      if (!active.test(v)) continue;
      int nbrs = 0;
      for (const auto& [w, m] : g_.neighbors(v))
        if (active.test(w)) ++nbrs;
      if (nbrs == 0) return 0;
      if (nbrs == 1) {
        int u = -1;
        long mult = 0;
        for (const auto& [w, m] : g_.neighbors(v))
          if (active.test(w)) {
            u = w;
            mult = m;
          }
        Mask next = active;
        next.clear(v);
        next.clear(u);
        return static_cast<u128>(mult) * count(next);
      }
      if (nbrs < best_nbrs) {
        best_nbrs = nbrs;
        best = v;
      }
    }
    if (active.popcount() % 2 != 0) return 0;

    // component split
    Mask comp{};
    std::vector<int> stack{active.lowest()};
    comp.set(active.lowest());
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (const auto& [w, m] : g_.neighbors(v))
        if (active.test(w) && !comp.test(w)) {
          comp.set(w);
          stack.push_back(w);
        }
    }
    if (!(comp == active)) return count(comp) * count(active.minus(comp));

    // single even cycle: two alternating edge classes
    if (best_nbrs == 2) {
      bool all_two = true;
      for (int v = 0; v < g_.vertex_count() && all_two; ++v) {
        if (!active.test(v)) continue;
        int nbrs = 0;
        for (const auto& [w, m] : g_.neighbors(v))
          if (active.test(w)) ++nbrs;
        all_two = nbrs == 2;
      }
      if (all_two) return cycle_count(active);
    }

    // branch on the minimum-degree vertex
    u128 total = 0;
    for (const auto& [w, m] : g_.neighbors(best)) {
      if (!active.test(w)) continue;
      Mask next = active;
      next.clear(best);
      next.clear(w);
      total += static_cast<u128>(m) * count(next);
    }
    return total;
  }

  u128 cycle_count(const Mask& active) {
    const int start = active.lowest();
    u128 even = 1, odd = 1;
    int prev = -1, cur = start, steps = 0;
    do {
      int next = -1;
      long mult = 0;
      for (const auto& [w, m] : g_.neighbors(cur))
        if (active.test(w) && w != prev) {
          next = w;
          mult = m;
          break;
        }
      if (next == -1) {  // two-vertex component: cur's only partner is prev
        return 0;        // unreachable; forced reduction handles it
      }
      if (steps % 2 == 0)
        even *= static_cast<u128>(mult);
      else
        odd *= static_cast<u128>(mult);
      prev = cur;
      cur = next;
      ++steps;
    } while (cur != start);
    if (steps % 2 != 0) return 0;
    return even + odd;
  }

  const CountGraph& g_;
  std::unordered_map<Mask, u128, MaskHash> memo_;
};

Int u128_to_int(u128 v) {
  const std::uint64_t hi = static_cast<std::uint64_t>(v >> 64);
  const std::uint64_t lo = static_cast<std::uint64_t>(v);
  Int out(static_cast<unsigned long>(hi));
  out <<= 64;
  out += Int(static_cast<unsigned long>(lo));
  return out;
}

// Edge bisection by Fiduccia-Mattheyses passes with incremental gains and
// several deterministic restarts; the smallest cut wins. Balance slack of
// one eighth keeps the dissection tree usable while letting the cut shrink.
class Bisector {
 public:
  Bisector(const CountGraph& g, const std::vector<int>& verts, std::uint64_t key)
      : g_(g), verts_(verts), n_(static_cast<int>(verts.size())), key_(key) {
    member_.assign(g.vertex_count(), 0);
    for (int v : verts) member_[v] = 1;
    slack_ = std::max(1, n_ / 6);
  }

  std::pair<std::vector<int>, std::vector<int>> run() {
    long best_cut = -1;
    std::vector<int> best_side;
    const auto consider = [&]() {
      const long cut = cut_size();
      if (best_cut < 0 || cut < best_cut) {
        best_cut = cut;
        best_side = side_;
      }
    };
    for (int restart = 0; restart < 10; ++restart) {
      seed(restart);
      refine();
      consider();
      // perturb the incumbent and refine again
      for (int round = 0; round < 2; ++round) {
        side_ = best_side;
        size0_ = 0;
        for (int v : verts_)
          if (side_[v] == 0) ++size0_;
        perturb(restart * 2 + round);
        refine();
        consider();
      }
    }
    side_ = best_side;
    std::vector<int> left, right;
    for (int v : verts_) (side_[v] == 0 ? left : right).push_back(v);
    return {left, right};
  }

 private:
  void seed(int restart) {
    side_.assign(g_.vertex_count(), 0);
    const int target = n_ / 2;
    if (restart < 4) {
      // BFS split from rotating start vertex
      const int start = verts_[(restart * n_) / 4];
      std::vector<char> seen(g_.vertex_count(), 0);
      std::vector<int> order;
      std::vector<int> queue{start};
      seen[start] = 1;
      for (std::size_t q = 0; q < queue.size(); ++q) {
        const int v = queue[q];
        order.push_back(v);
        for (const auto& [w, m] : g_.neighbors(v))
          if (member_[w] && !seen[w]) {
            seen[w] = 1;
            queue.push_back(w);
          }
      }
      for (int v : verts_)
        if (!seen[v]) order.push_back(v);
      for (int i = 0; i < n_; ++i) side_[order[i]] = i < target ? 0 : 1;
      size0_ = target;
    } else {
      // keyed pseudo-random split
      size0_ = 0;
      int assigned = 0;
      for (int v : verts_) {
        const bool zero =
            (mix64(key_ ^ (0xB15EC7ull + v * 0x9E3779B97F4A7C15ull + restart)) & 1) == 0;
        if ((zero && size0_ < target) || assigned - size0_ >= n_ - target) {
          side_[v] = 0;
          ++size0_;
        } else {
          side_[v] = 1;
        }
        ++assigned;
      }
    }
  }

  void perturb(int round) {
    for (int v : verts_) {
      if ((mix64(key_ ^ (0xF1195EEDull + v * 0x9E3779B97F4A7C15ull + round)) & 7) == 0) {
        const int new_size0 = size0_ + (side_[v] == 0 ? -1 : 1);
        if (std::abs(2 * new_size0 - n_) > 2 * slack_) continue;
        size0_ = new_size0;
        side_[v] = 1 - side_[v];
      }
    }
  }

  long cut_size() const {
    long cut = 0;
    for (int v : verts_)
      for (const auto& [w, m] : g_.neighbors(v))
        if (member_[w] && w > v && side_[w] != side_[v]) cut += m;
    return cut;
  }

  void refine() {
    std::vector<long> gain(g_.vertex_count(), 0);
    for (int pass = 0; pass < 16; ++pass) {
      for (int v : verts_) {
        long s = 0;
        for (const auto& [w, m] : g_.neighbors(v))
          if (member_[w]) s += (side_[w] != side_[v]) ? m : -m;
        gain[v] = s;
      }
      std::vector<char> locked(g_.vertex_count(), 0);
      std::vector<int> moved;
      long cumulative = 0, best_prefix_gain = 0;
      int best_prefix = 0;
      for (int step = 0; step < n_; ++step) {
        int pick = -1;
        long pick_gain = 0;
        for (int v : verts_) {
          if (locked[v]) continue;
          const int new_size0 = size0_ + (side_[v] == 0 ? -1 : 1);
          if (std::abs(2 * new_size0 - n_) > 2 * slack_) continue;
          if (pick < 0 || gain[v] > pick_gain || (gain[v] == pick_gain && v < pick)) {
            pick = v;
            pick_gain = gain[v];
          }
        }
        if (pick < 0) break;
        locked[pick] = 1;
        size0_ += side_[pick] == 0 ? -1 : 1;
        side_[pick] = 1 - side_[pick];
        gain[pick] = -gain[pick];
        for (const auto& [w, m] : g_.neighbors(pick))
          if (member_[w]) gain[w] += (side_[w] == side_[pick]) ? -2 * m : 2 * m;
        moved.push_back(pick);
        cumulative += pick_gain;
        if (cumulative > best_prefix_gain) {
          best_prefix_gain = cumulative;
          best_prefix = static_cast<int>(moved.size());
        }
      }
      for (int i = static_cast<int>(moved.size()) - 1; i >= best_prefix; --i) {
        const int v = moved[i];
        size0_ += side_[v] == 0 ? -1 : 1;
        side_[v] = 1 - side_[v];
      }
      if (best_prefix_gain <= 0) break;
    }
  }

  const CountGraph& g_;
  const std::vector<int>& verts_;
  int n_;
  std::uint64_t key_ = 0;
  int slack_ = 1;
  int size0_ = 0;
  std::vector<char> member_;
  std::vector<int> side_;
};

std::pair<std::vector<int>, std::vector<int>> bisect(const CountGraph& g,
                                                     const std::vector<int>& verts,
                                                     std::uint64_t key) {
  return Bisector(g, verts, key).run();
}

// Static dissection tree. A node owns a vertex set; internal nodes carry the
// crossing edge classes between their children. Counting works per node on
// "removal masks" over the node's boundary (the ancestor-cut endpoints that
// live inside it) - everything else in the node is always active - so the
// per-node memo is a flat table indexed by packed boundary bits. Each
// internal node precomputes its cut-matching patterns once; a pattern stores
// the removal bits it adds in the child boundary spaces.
constexpr int kNdLeafSize = 18;
constexpr int kNdThreshold = 40;
constexpr int kNdTableBits = 22;

class NdCounter {
 public:
  NdCounter(const CountGraph& g, std::uint64_t key) : g_(g), key_(key), leaf_counter_(g) {
    std::vector<int> all(g.vertex_count());
    std::iota(all.begin(), all.end(), 0);
    build(all, {});
    for (auto& node : nodes_) {
      if (node.boundary.size() > 31) usable_ = false;
      finalize(node);
    }
  }

  bool usable() const { return usable_; }

  // pessimistic work proxy: every boundary mask evaluated against every
  // cut-matching pattern
  double cost_estimate() const {
    double cost = 0;
    for (const auto& node : nodes_) {
      const double masks = std::pow(2.0, std::min<std::size_t>(node.boundary.size(), 40));
      const double inner = node.leaf ? 16.0 : double(node.patterns.size());
      cost += masks * inner;
    }
    return cost;
  }

  u128 count_all() { return count(0, 0); }

 private:
  static constexpr u128 kUnset = ~u128(0);

  struct Pattern {
    std::uint32_t left_removed = 0;   // bits in left child boundary space
    std::uint32_t right_removed = 0;  // bits in right child boundary space
    u128 weight = 1;
  };

  struct Node {
    std::vector<int> verts;
    std::vector<int> boundary;  // ancestor-cut endpoints inside this node
    int left = -1, right = -1;
    bool leaf = true;
    int interior_count = 0;  // vertices not on the boundary
    // scatter of own boundary bits into child boundary spaces
    std::vector<std::uint32_t> to_left, to_right;
    std::vector<Pattern> patterns;
    std::vector<u128> table;                     // when boundary fits kNdTableBits
    std::unordered_map<std::uint32_t, u128> overflow;  // otherwise
    Mask vert_mask{};
  };

  int build(const std::vector<int>& verts, const std::vector<int>& boundary) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    nodes_[id].verts = verts;
    nodes_[id].boundary = boundary;
    if (static_cast<int>(verts.size()) <= kNdLeafSize) return id;
    const auto [lv, rv] = bisect(g_, verts, key_);
    if (lv.empty() || rv.empty()) return id;
    std::vector<char> in_left(g_.vertex_count(), 0), member(g_.vertex_count(), 0);
    for (int v : lv) in_left[v] = 1;
    for (int v : verts) member[v] = 1;
    std::vector<std::tuple<int, int, long>> cut;
    for (int v : lv)
      for (const auto& [w, mult] : g_.neighbors(v))
        if (member[w] && !in_left[w]) cut.push_back({v, w, mult});
    if (std::getenv("LIFTPM_ND_DEBUG"))
      std::fprintf(stderr, "nd split n=%zu cut=%zu\n", verts.size(), cut.size());

    // children inherit the relevant part of the boundary plus the new cut ends
    const auto child_boundary = [&](const std::vector<int>& side, bool left_side) {
      std::vector<int> out;
      std::vector<char> on_side(g_.vertex_count(), 0);
      for (int v : side) on_side[v] = 1;
      for (int v : boundary)
        if (on_side[v]) out.push_back(v);
      for (const auto& [u, w, m] : cut) {
        const int endpoint = left_side ? u : w;
        if (std::find(out.begin(), out.end(), endpoint) == out.end()) out.push_back(endpoint);
      }
      return out;
    };
    const std::vector<int> lb = child_boundary(lv, true);
    const std::vector<int> rb = child_boundary(rv, false);
    const int li = build(lv, lb);
    const int ri = build(rv, rb);

    Node& node = nodes_[id];
    node.left = li;
    node.right = ri;
    node.leaf = false;

    const auto pos_in = [](const std::vector<int>& list, int v) {
      return static_cast<int>(std::find(list.begin(), list.end(), v) - list.begin());
    };
    node.to_left.assign(node.boundary.size(), 0);
    node.to_right.assign(node.boundary.size(), 0);
    for (std::size_t i = 0; i < node.boundary.size(); ++i) {
      const int v = node.boundary[i];
      if (in_left[v])
        node.to_left[i] = 1u << pos_in(lb, v);
      else
        node.to_right[i] = 1u << pos_in(rb, v);
    }

    // matchings over the cut as removal patterns in child boundary spaces
    std::vector<std::uint32_t> lbit(cut.size()), rbit(cut.size());
    for (std::size_t c = 0; c < cut.size(); ++c) {
      lbit[c] = 1u << pos_in(lb, std::get<0>(cut[c]));
      rbit[c] = 1u << pos_in(rb, std::get<1>(cut[c]));
    }
    std::vector<Pattern> patterns;
    const auto gen = [&](auto&& self, std::size_t c, Pattern cur) -> void {
      if (c == cut.size()) {
        patterns.push_back(cur);
        return;
      }
      self(self, c + 1, cur);  // exclude
      if (!(cur.left_removed & lbit[c]) && !(cur.right_removed & rbit[c])) {
        Pattern next = cur;
        next.left_removed |= lbit[c];
        next.right_removed |= rbit[c];
        next.weight = cur.weight * static_cast<u128>(std::get<2>(cut[c]));
        self(self, c + 1, next);
      }
    };
    gen(gen, 0, Pattern{});
    std::sort(patterns.begin(), patterns.end(), [](const Pattern& a, const Pattern& b) {
      return a.left_removed < b.left_removed ||
             (a.left_removed == b.left_removed && a.right_removed < b.right_removed);
    });
    node.patterns = std::move(patterns);
    return id;
  }

  void finalize(Node& node) {
    node.interior_count = static_cast<int>(node.verts.size() - node.boundary.size());
    for (int v : node.verts) node.vert_mask.set(v);
    if (node.boundary.size() <= kNdTableBits)
      node.table.assign(std::size_t(1) << node.boundary.size(), kUnset);
  }

  u128 leaf_count(const Node& node, std::uint32_t removed) {
    Mask active = node.vert_mask;
    for (std::size_t i = 0; i < node.boundary.size(); ++i)
      if (removed & (1u << i)) active.clear(node.boundary[i]);
    return leaf_counter_.count(active);
  }

  u128 count(int id, std::uint32_t removed) {
    Node& node = nodes_[id];
    // parity of the active part
    if ((node.interior_count + std::popcount(~removed & ((1u << node.boundary.size()) - 1))) %
            2 !=
        0)
      return 0;

    u128* slot = nullptr;
    if (!node.table.empty()) {
      slot = &node.table[removed];
      if (*slot != kUnset) return *slot;
    } else if (auto it = node.overflow.find(removed); it != node.overflow.end()) {
      return it->second;
    }

    u128 total = 0;
    if (node.leaf) {
      total = leaf_count(node, removed);
    } else {
      std::uint32_t left_removed = 0, right_removed = 0;
      std::uint32_t bits = removed;
      while (bits) {
        const int i = std::countr_zero(bits);
        bits &= bits - 1;
        left_removed |= node.to_left[i];
        right_removed |= node.to_right[i];
      }
      std::uint32_t cached_left = ~0u;
      u128 cached_count = 0;
      for (const Pattern& p : node.patterns) {
        if ((p.left_removed & left_removed) || (p.right_removed & right_removed)) continue;
        if (p.left_removed != cached_left) {
          cached_left = p.left_removed;
          cached_count = count(node.left, left_removed | p.left_removed);
        }
        if (cached_count == 0) continue;
        const u128 r = count(node.right, right_removed | p.right_removed);
        if (r == 0) continue;
        total += p.weight * cached_count * r;
      }
    }
    if (slot)
      *slot = total;
    else
      node.overflow.emplace(removed, total);
    return total;
  }

  const CountGraph& g_;
  std::uint64_t key_ = 0;
  std::vector<Node> nodes_;
  PmCounter leaf_counter_;
  bool usable_ = true;
};

}  // namespace

Int count_perfect_matchings(const CountGraph& H) {
  if (H.vertex_count() % 2 != 0) return 0;
  if (H.vertex_count() == 0) return 1;
  if (H.vertex_count() <= kNdThreshold) {
    Mask all{};
    for (int v = 0; v < H.vertex_count(); ++v) all.set(v);
    PmCounter counter(H);
    return u128_to_int(counter.count(all));
  }
  std::unique_ptr<NdCounter> best;
  double best_cost = 0;
  for (std::uint64_t key : {0ull, 0xD15EC7ull, 0xFACADEull, 0x5CA1AB1Eull}) {
    auto cand = std::make_unique<NdCounter>(H, key);
    if (!cand->usable()) continue;
    const double cost = cand->cost_estimate();
    if (!best || cost < best_cost) {
      best = std::move(cand);
      best_cost = cost;
    }
  }
  if (best) return u128_to_int(best->count_all());
  Mask all{};
  for (int v = 0; v < H.vertex_count(); ++v) all.set(v);
  PmCounter fallback(H);
  return u128_to_int(fallback.count(all));
}

std::vector<Int> count_k_cycles(const CountGraph& H, int kmax) {
  if (kmax > 12) throw budget_error("cycle counting capped at kmax = 12");
  std::vector<Int> z(std::max(kmax + 1, 3), 0);
  if (kmax < 2) return z;
  const int n = H.vertex_count();
  // 2-cycles: unordered pairs of parallel edges
  for (int v = 0; v < n; ++v)
    for (const auto& [w, m] : H.neighbors(v))
      if (w > v && m >= 2) z[2] += Int(m) * (m - 1) / 2;
  if (kmax < 3) return z;

  std::vector<char> on_path(n, 0);
  std::vector<int> path;
  path.reserve(kmax);

  // rooted paths with all vertices > root; closure counted in the
  // direction with path[1] < path.back()
  const auto dfs = [&](auto&& self, int root, long mult_product) -> void {
    const int cur = path.back();
    for (const auto& [w, m] : H.neighbors(cur)) {
      if (w == root && path.size() >= 3) {
        if (path[1] < path.back()) {
          const int len = static_cast<int>(path.size());
          z[len] += Int(mult_product) * m;
        }
        continue;
      }
      if (w <= root || on_path[w]) continue;
      if (static_cast<int>(path.size()) >= kmax) continue;
      on_path[w] = 1;
      path.push_back(w);
      self(self, root, mult_product * m);
      path.pop_back();
      on_path[w] = 0;
    }
  };

  for (int root = 0; root < n; ++root) {
    path.assign(1, root);
    on_path[root] = 1;
    dfs(dfs, root, 1);
    on_path[root] = 0;
  }
  return z;
}

CountGraph Lift::to_count_graph() const {
  CountGraph H(vertex_count());
  for (int e = 0; e < base->edge_count(); ++e) {
    const auto& [u, v] = base->edge(e);
    for (int a = 0; a < n; ++a) H.add_edge(vertex(u, a), vertex(v, fibers[e][a]), 1);
  }
  return H;
}

Lift sample_lift(const Multigraph& G, int n, std::uint64_t seed, std::uint64_t trial) {
  if (n < 1) throw validation_error("lift size n must be >= 1");
  Lift L;
  L.base = &G;
  L.n = n;
  L.fibers.resize(G.edge_count());
  for (int e = 0; e < G.edge_count(); ++e) {
    auto& pi = L.fibers[e];
    pi.resize(n);
    std::iota(pi.begin(), pi.end(), 0);
    KeyedStream rng(seed, static_cast<std::uint64_t>(e), trial);
    rng.shuffle(pi);
  }
  return L;
}

ExhaustiveMoments exhaustive_lift_oracle(const Multigraph& G, int n, int kmax,
                                         std::uint64_t budget) {
  if (n < 1) throw validation_error("lift size n must be >= 1");
  const int h = G.edge_count();
  // all permutations of [n]
  std::vector<std::vector<int>> perms;
  std::vector<int> base(n);
  std::iota(base.begin(), base.end(), 0);
  do {
    perms.push_back(base);
  } while (std::next_permutation(base.begin(), base.end()));

  double total_log = h * std::log(double(perms.size()));
  if (total_log > std::log(double(budget)))
    throw budget_error("exhaustive oracle budget exceeded: (n!)^h > " +
                       std::to_string(budget));
  long long total = 1;
  for (int e = 0; e < h; ++e) total *= static_cast<long long>(perms.size());

  ExhaustiveMoments out;
  out.lift_count = total;
  Int sum_x = 0, sum_x2 = 0;
  std::vector<Int> sum_zk(kmax + 1, 0), sum_xzk(kmax + 1, 0);

  Lift L;
  L.base = &G;
  L.n = n;
  L.fibers.assign(h, perms[0]);
  std::vector<std::size_t> which(h, 0);
  for (long long it = 0; it < total; ++it) {
    const CountGraph H = L.to_count_graph();
    const Int x = count_perfect_matchings(H);
    sum_x += x;
    sum_x2 += x * x;
    if (kmax >= 2) {
      const auto z = count_k_cycles(H, kmax);
      for (int k = 2; k <= kmax; ++k) {
        sum_zk[k] += z[k];
        sum_xzk[k] += x * z[k];
      }
    }
    // mixed-radix increment
    for (int e = 0; e < h; ++e) {
      which[e] = (which[e] + 1) % perms.size();
      L.fibers[e] = perms[which[e]];
      if (which[e] != 0) break;
    }
  }
  out.mean_x = make_rat(sum_x, Int(static_cast<long>(total)));
  out.mean_x2 = make_rat(sum_x2, Int(static_cast<long>(total)));
  out.mean_zk.assign(kmax + 1, Rat(0));
  out.mean_x_zk.assign(kmax + 1, Rat(0));
  for (int k = 2; k <= kmax; ++k) {
    out.mean_zk[k] = make_rat(sum_zk[k], Int(static_cast<long>(total)));
    out.mean_x_zk[k] = make_rat(sum_xzk[k], Int(static_cast<long>(total)));
  }
  return out;
}

SimReport monte_carlo_moments(const Multigraph& G, int n, int trials, int kmax,
                              std::uint64_t seed, int threads) {
  if (trials < 100) throw validation_error("simulation needs at least 100 trials");
  if (G.vertex_count() * n > 128)
    throw budget_error("exact per-trial matching count capped at 128 lift vertices");
  if (kmax < 2) kmax = 2;

  SimReport rep;
  rep.n = n;
  rep.trials = trials;
  rep.kmax = kmax;
  rep.seed = seed;
  rep.x_samples.assign(trials, 0.0);
  rep.z_samples.assign(trials, std::vector<long>(kmax + 1, 0));

  const auto worker = [&](int lo, int hi) {
    for (int t = lo; t < hi; ++t) {
      const Lift L = sample_lift(G, n, seed, static_cast<std::uint64_t>(t));
      const CountGraph H = L.to_count_graph();
      rep.x_samples[t] = count_perfect_matchings(H).get_d();
      const auto z = count_k_cycles(H, kmax);
      for (int k = 2; k <= kmax; ++k) rep.z_samples[t][k] = static_cast<long>(z[k].get_si());
    }
  };
  threads = std::max(1, std::min(threads, trials));
  if (threads == 1) {
    worker(0, trials);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (trials + threads - 1) / threads;
    for (int i = 0; i < threads; ++i) {
      const int lo = i * chunk;
      const int hi = std::min(trials, lo + chunk);
      if (lo < hi) pool.emplace_back(worker, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  // targets from the cycle series when regular
  std::vector<double> lambda(kmax + 1, 0.0), mu(kmax + 1, 0.0);
  const auto d = G.regular_degree();
  const bool have_targets = d && *d >= 3;
  if (have_targets) {
    const auto M = build_matrices(G);
    const auto cs = cycle_series(G, M, kmax);
    lambda = cs.lambda;
    mu = cs.mu;
  }

  const auto mean_se = [&](auto value_of) {
    double mean = 0;
    for (int t = 0; t < trials; ++t) mean += value_of(t);
    mean /= trials;
    double var = 0;
    for (int t = 0; t < trials; ++t) {
      const double dlt = value_of(t) - mean;
      var += dlt * dlt;
    }
    var /= (trials - 1);
    return std::pair<double, double>(mean, std::sqrt(var / trials));
  };
  const auto fill = [&](SimEstimate& est, double value, double se, double target) {
    est.value = value;
    est.std_error = se;
    est.target = target;
    est.z_score = se > 0 ? (value - target) / se : (value == target ? 0.0 : HUGE_VAL);
  };

  {
    // no analytic finite-n target for the raw moments; callers compare
    // against asymptotics themselves
    const auto [m, se] = mean_se([&](int t) { return rep.x_samples[t]; });
    fill(rep.mean_x, m, se, 0.0);
    rep.mean_x.z_score = 0.0;
    const auto [m2, se2] = mean_se([&](int t) { return rep.x_samples[t] * rep.x_samples[t]; });
    fill(rep.mean_x2, m2, se2, 0.0);
    rep.mean_x2.z_score = 0.0;
  }

  rep.mean_zk.assign(kmax + 1, {});
  rep.var_zk.assign(kmax + 1, {});
  rep.xzk_ratio.assign(kmax + 1, {});
  for (int k = 2; k <= kmax; ++k) {
    const auto [mz, sez] = mean_se([&](int t) { return double(rep.z_samples[t][k]); });
    fill(rep.mean_zk[k], mz, sez, lambda[k]);

    // sample variance with a moment-based standard error
    double var = 0, m4 = 0;
    for (int t = 0; t < trials; ++t) {
      const double dlt = rep.z_samples[t][k] - mz;
      var += dlt * dlt;
      m4 += dlt * dlt * dlt * dlt;
    }
    var /= (trials - 1);
    m4 /= trials;
    const double se_var = std::sqrt(std::max(0.0, m4 - var * var) / trials);
    fill(rep.var_zk[k], var, se_var, lambda[k]);

    // ratio estimator E[X Z_k]/E[X] with linearized standard error
    double sx = 0, sxz = 0;
    for (int t = 0; t < trials; ++t) {
      sx += rep.x_samples[t];
      sxz += rep.x_samples[t] * rep.z_samples[t][k];
    }
    const double ratio = sx > 0 ? sxz / sx : 0.0;
    double resid = 0;
    for (int t = 0; t < trials; ++t) {
      const double r = rep.x_samples[t] * (rep.z_samples[t][k] - ratio);
      resid += r * r;
    }
    const double se_ratio = sx > 0 ? std::sqrt(resid) / sx : 0.0;
    fill(rep.xzk_ratio[k], ratio, se_ratio, mu[k]);
    if (!have_targets) {
      rep.mean_zk[k].z_score = 0.0;
      rep.var_zk[k].z_score = 0.0;
      rep.xzk_ratio[k].z_score = 0.0;
    }
  }
  return rep;
}

}  // namespace liftpm
