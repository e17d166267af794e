#pragma once

// Labeled graphs and trees on {1..p}: Pruefer enumeration, the Penrose map,
// H*(T), the partition of connected graphs, and the naive interpolation
// matrices of the direct resummation.

#include "eigen_support.hpp"
#include "linalg.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

namespace fermicalc {

struct Edge {
  int a = 0;  // a < b, vertices 1-based
  int b = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline Edge make_edge(int x, int y) {
  if (x == y) throw std::invalid_argument("self-loops are not edges");
  return x < y ? Edge{x, y} : Edge{y, x};
}

/// Bit position of edge {a,b} in a graph mask on p vertices.
inline int edge_index(int p, Edge e) {
  // rows a = 1..p-1 hold p-a edges each
  return (e.a - 1) * p - (e.a - 1) * e.a / 2 + (e.b - e.a - 1);
}

inline Edge edge_at(int p, int index) {
  for (int a = 1; a < p; ++a) {
    const int row = p - a;
    if (index < row) return {a, a + 1 + index};
    index -= row;
  }
  throw std::out_of_range("edge index out of range");
}

inline int pair_count(int p) { return p * (p - 1) / 2; }

struct Graph {
  int p = 0;
  std::uint64_t mask = 0;

  bool has(Edge e) const { return (mask >> edge_index(p, e)) & 1U; }
  void add(Edge e) { mask |= std::uint64_t{1} << edge_index(p, e); }
  int edge_count() const { return std::popcount(mask); }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (std::uint64_t rest = mask; rest; rest &= rest - 1) out.push_back(edge_at(p, std::countr_zero(rest)));
    return out;
  }

  /// Adjacency bitmasks, bit v-1 for vertex v.
  std::vector<std::uint32_t> adjacency() const {
    std::vector<std::uint32_t> adj(static_cast<std::size_t>(p) + 1, 0);
    for (const auto& e : edges()) {
      adj[static_cast<std::size_t>(e.a)] |= std::uint32_t{1} << (e.b - 1);
      adj[static_cast<std::size_t>(e.b)] |= std::uint32_t{1} << (e.a - 1);
    }
    return adj;
  }

  /// Graph distance from vertex 1 (-1 when unreachable), index 1..p.
  std::vector<int> distances_from_root() const {
    auto adj = adjacency();
    std::vector<int> dist(static_cast<std::size_t>(p) + 1, -1);
    std::queue<int> todo;
    dist[1] = 0;
    todo.push(1);
    while (!todo.empty()) {
      const int v = todo.front();
      todo.pop();
      for (std::uint32_t rest = adj[static_cast<std::size_t>(v)]; rest; rest &= rest - 1) {
        const int w = std::countr_zero(rest) + 1;
        if (dist[static_cast<std::size_t>(w)] < 0) {
          dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(v)] + 1;
          todo.push(w);
        }
      }
    }
    return dist;
  }

  bool connected() const {
    auto d = distances_from_root();
    return std::all_of(d.begin() + 1, d.end(), [](int x) { return x >= 0; });
  }

  friend bool operator==(const Graph&, const Graph&) = default;
};

struct Tree {
  int p = 0;
  std::vector<Edge> edges;  // sorted

  Graph graph() const {
    Graph g{p, 0};
    for (const auto& e : edges) g.add(e);
    return g;
  }

  /// Tree-parent of each vertex when rooted at 1 (0 for the root), index 1..p.
  std::vector<int> parents() const {
    const Graph g = graph();
    auto adj = g.adjacency();
    auto dist = g.distances_from_root();
    std::vector<int> parent(static_cast<std::size_t>(p) + 1, 0);
    for (int v = 2; v <= p; ++v)
      for (std::uint32_t rest = adj[static_cast<std::size_t>(v)]; rest; rest &= rest - 1) {
        const int w = std::countr_zero(rest) + 1;
        if (dist[static_cast<std::size_t>(w)] == dist[static_cast<std::size_t>(v)] - 1) parent[static_cast<std::size_t>(v)] = w;
      }
    return parent;
  }

  std::vector<int> depths() const { return graph().distances_from_root(); }

  /// Incidence numbers d_q (vertex degrees), index 1..p.
  std::vector<int> incidence() const {
    std::vector<int> d(static_cast<std::size_t>(p) + 1, 0);
    for (const auto& e : edges) {
      ++d[static_cast<std::size_t>(e.a)];
      ++d[static_cast<std::size_t>(e.b)];
    }
    return d;
  }

  bool valid() const {
    return static_cast<int>(edges.size()) == p - 1 && graph().connected();
  }

  friend bool operator==(const Tree&, const Tree&) = default;
  friend auto operator<=>(const Tree& x, const Tree& y) { return x.edges <=> y.edges; }
};

inline Tree tree_from_edges(int p, std::vector<Edge> edges) {
  std::sort(edges.begin(), edges.end());
  Tree t{p, std::move(edges)};
  if (!t.valid()) throw std::invalid_argument("edge list is not a spanning tree");
  return t;
}

inline Tree tree_from_graph(const Graph& g) {
  return tree_from_edges(g.p, g.edges());
}

inline constexpr int tree_p_max = 9;

/// Decodes a Pruefer sequence (entries 1..p) into a tree.
inline Tree tree_from_pruefer(int p, const std::vector<int>& seq) {
  std::vector<int> degree(static_cast<std::size_t>(p) + 1, 1);
  for (int x : seq) ++degree[static_cast<std::size_t>(x)];
  std::vector<Edge> edges;
  for (int x : seq) {
    int leaf = 1;
    while (degree[static_cast<std::size_t>(leaf)] != 1) ++leaf;
    edges.push_back(make_edge(leaf, x));
    --degree[static_cast<std::size_t>(leaf)];
    --degree[static_cast<std::size_t>(x)];
  }
  int u = 0, w = 0;
  for (int v = 1; v <= p; ++v)
    if (degree[static_cast<std::size_t>(v)] == 1) (u == 0 ? u : w) = v;
  edges.push_back(make_edge(u, w));
  std::sort(edges.begin(), edges.end());
  return Tree{p, std::move(edges)};
}

/// All labeled trees on {1..p}, 2 <= p <= 9, in Pruefer-sequence order.
inline std::vector<Tree> enumerate_trees(int p) {
  if (p < 2 || p > tree_p_max) throw std::out_of_range("enumerate_trees supports 2 <= p <= 9");
  std::vector<Tree> out;
  if (p == 2) return {Tree{2, {{1, 2}}}};
  std::vector<int> seq(static_cast<std::size_t>(p - 2), 1);
  for (;;) {
    out.push_back(tree_from_pruefer(p, seq));
    std::size_t k = 0;
    while (k < seq.size() && ++seq[k] > p) seq[k++] = 1;
    if (k == seq.size()) break;
  }
  return out;
}

/// Penrose's map: BFS layers from 1, drop intra-layer lines, keep for each
/// vertex the reaching line from the smallest lower neighbour.
inline Tree penrose_map(const Graph& g) {
  auto dist = g.distances_from_root();
  if (std::any_of(dist.begin() + 1, dist.end(), [](int x) { return x < 0; }))
    throw std::invalid_argument("penrose_map needs a connected graph");
  auto adj = g.adjacency();
  std::vector<Edge> edges;
  for (int q = 2; q <= g.p; ++q)
    for (std::uint32_t rest = adj[static_cast<std::size_t>(q)]; rest; rest &= rest - 1) {
      const int w = std::countr_zero(rest) + 1;  // ascending, so first hit is smallest
      if (dist[static_cast<std::size_t>(w)] == dist[static_cast<std::size_t>(q)] - 1) {
        edges.push_back(make_edge(q, w));
        break;
      }
    }
  std::sort(edges.begin(), edges.end());
  return Tree{g.p, std::move(edges)};
}

/// H*(T): all intra-layer pairs, plus {q'', q} with q'' one layer above q and
/// larger than q's tree parent.
inline Graph compatible_lines(const Tree& t) {
  auto depth = t.depths();
  auto parent = t.parents();
  Graph h{t.p, 0};
  for (int q = 1; q <= t.p; ++q)
    for (int r = q + 1; r <= t.p; ++r) {
      const int dq = depth[static_cast<std::size_t>(q)], dr = depth[static_cast<std::size_t>(r)];
      if (dq == dr && dq >= 1) h.add({q, r});
    }
  for (int q = 2; q <= t.p; ++q)
    for (int other = parent[static_cast<std::size_t>(q)] + 1; other <= t.p; ++other)
      if (depth[static_cast<std::size_t>(other)] == depth[static_cast<std::size_t>(q)] - 1) h.add(make_edge(other, q));
  return h;
}

struct PartitionReport {
  int p = 0;
  std::uint64_t connected_graphs = 0;     // brute-force count
  std::uint64_t tree_family_total = 0;    // sum over T of 2^{|H*(T)|}
  std::uint64_t covered_twice = 0;        // graphs produced by two trees (or twice)
  std::uint64_t uncovered = 0;            // connected graphs produced by no tree
  std::uint64_t penrose_mismatches = 0;   // T u H with Phi(T u H) != T
  std::uint64_t tree_overlaps = 0;        // trees with T n H*(T) nonempty
  std::uint64_t disconnected_hits = 0;    // disconnected graphs produced by some tree
  bool ok() const {
    return connected_graphs == tree_family_total && covered_twice == 0 && uncovered == 0 && penrose_mismatches == 0 &&
           tree_overlaps == 0 && disconnected_hits == 0;
  }
};

/// Exhaustively checks that {T u H : H subset of H*(T)} partitions the connected graphs.
inline PartitionReport verify_partition(int p) {
  if (p < 2 || p > 6) throw std::out_of_range("verify_partition supports 2 <= p <= 6");
  PartitionReport r;
  r.p = p;
  const std::uint64_t graphs = std::uint64_t{1} << pair_count(p);
  std::vector<std::uint8_t> hits(graphs, 0);
  for (const auto& t : enumerate_trees(p)) {
    const Graph tg = t.graph();
    const Graph hs = compatible_lines(t);
    if (tg.mask & hs.mask) ++r.tree_overlaps;
    r.tree_family_total += std::uint64_t{1} << hs.edge_count();
    for (std::uint64_t sub = hs.mask;; sub = (sub - 1) & hs.mask) {
      Graph g{p, tg.mask | sub};
      if (hits[g.mask] < 255) ++hits[g.mask];
      if (!(penrose_map(g) == t)) ++r.penrose_mismatches;
      if (sub == 0) break;
    }
  }
  for (std::uint64_t m = 0; m < graphs; ++m) {
    const bool conn = Graph{p, m}.connected();
    if (conn) ++r.connected_graphs;
    if (hits[m] > 1) ++r.covered_twice;
    if (conn && hits[m] == 0) ++r.uncovered;
    if (!conn && hits[m] > 0) ++r.disconnected_hits;
  }
  return r;
}

/// Vertex order: root, then layer by layer; a layer lists the children of the
/// previous layer's vertices in that layer's order, each group ascending.
inline std::vector<int> layered_order(const Tree& t) {
  auto parent = t.parents();
  std::vector<int> order{1};
  std::vector<int> layer{1};
  while (!layer.empty()) {
    std::vector<int> next;
    for (int v : layer)
      for (int w = 2; w <= t.p; ++w)
        if (parent[static_cast<std::size_t>(w)] == v) next.push_back(w);
    order.insert(order.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return order;
}

/// Naive interpolation matrix of the direct resummation in vertex-label order:
/// 1 on the diagonal and on H*(T), s_e on tree line e, 0 elsewhere.
inline Matrix<Rational> naive_matrix(const Tree& t, const std::map<Edge, Rational>& s) {
  const auto n = static_cast<std::size_t>(t.p);
  Matrix<Rational> m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  for (const auto& e : compatible_lines(t).edges()) {
    m(static_cast<std::size_t>(e.a - 1), static_cast<std::size_t>(e.b - 1)) = 1;
    m(static_cast<std::size_t>(e.b - 1), static_cast<std::size_t>(e.a - 1)) = 1;
  }
  for (const auto& e : t.edges) {
    auto it = s.find(e);
    if (it == s.end()) throw std::invalid_argument("missing interpolation parameter for a tree line");
    m(static_cast<std::size_t>(e.a - 1), static_cast<std::size_t>(e.b - 1)) = it->second;
    m(static_cast<std::size_t>(e.b - 1), static_cast<std::size_t>(e.a - 1)) = it->second;
  }
  return m;
}

struct BandReport {
  std::vector<int> order;          // layered vertex order
  Matrix<Rational> matrix;         // M^{(T)} permuted to that order
  bool band_structure = false;     // nonzero entries only within or between adjacent layers
  Rational determinant;
  std::vector<Rational> leading_minors;
  PsdCertificate certificate;      // exact LDL^T
  bool psd_by_charpoly = false;
  double min_eigenvalue = 0.0;
};

inline BandReport band_matrix_analysis(const Tree& t, const std::map<Edge, Rational>& s) {
  BandReport r;
  r.order = layered_order(t);
  std::vector<std::size_t> idx;
  for (int v : r.order) idx.push_back(static_cast<std::size_t>(v - 1));
  r.matrix = naive_matrix(t, s).submatrix(idx, idx);
  auto depth = t.depths();
  r.band_structure = true;
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j)
      if (sgn(r.matrix(i, j)) != 0 &&
          std::abs(depth[static_cast<std::size_t>(r.order[i])] - depth[static_cast<std::size_t>(r.order[j])]) > 1)
        r.band_structure = false;
  r.determinant = determinant(r.matrix);
  r.leading_minors = leading_principal_minors(r.matrix);
  r.certificate = ldlt_certificate(r.matrix);
  r.psd_by_charpoly = fermicalc::psd_by_charpoly(r.matrix);
  r.min_eigenvalue = min_eigenvalue(to_double(r.matrix));
  return r;
}

}  // namespace fermicalc
