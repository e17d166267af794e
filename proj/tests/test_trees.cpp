#include <fermicalc/random.hpp>
#include <fermicalc/resummation.hpp>
#include <fermicalc/trees.hpp>

#include <gtest/gtest.h>

#include <set>

using namespace fermicalc;
using E = GrassmannElement<Rational>;

namespace {

long long ipow(long long b, int e) {
  long long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

/// Independent tree test: p-1 edges and union-find finds no cycle.
bool is_spanning_tree(int p, const std::vector<Edge>& edges) {
  if (static_cast<int>(edges.size()) != p - 1) return false;
  std::vector<int> root(static_cast<std::size_t>(p) + 1);
  for (int v = 0; v <= p; ++v) root[static_cast<std::size_t>(v)] = v;
  auto find = [&](int v) {
    while (root[static_cast<std::size_t>(v)] != v) v = root[static_cast<std::size_t>(v)];
    return v;
  };
  for (const auto& e : edges) {
    const int a = find(e.a), b = find(e.b);
    if (a == b) return false;
    root[static_cast<std::size_t>(a)] = b;
  }
  return true;
}

}  // namespace

TEST(EnumerateTrees, CayleyCountsDistinctAndValid) {
  for (int p = 2; p <= 7; ++p) {
    auto trees = enumerate_trees(p);
    EXPECT_EQ(static_cast<long long>(trees.size()), ipow(p, p - 2)) << "p=" << p;
    std::set<std::vector<Edge>> distinct;
    for (const auto& t : trees) {
      EXPECT_TRUE(is_spanning_tree(p, t.edges));
      auto d = t.incidence();
      int sum = 0;
      for (int q = 1; q <= p; ++q) sum += d[static_cast<std::size_t>(q)];
      EXPECT_EQ(sum, 2 * (p - 1));
      distinct.insert(t.edges);
    }
    EXPECT_EQ(distinct.size(), trees.size());
  }
  EXPECT_THROW(enumerate_trees(1), std::out_of_range);
  EXPECT_THROW(enumerate_trees(10), std::out_of_range);
}

TEST(PenroseMap, TreesAreFixed) {
  for (int p = 2; p <= 6; ++p)
    for (const auto& t : enumerate_trees(p)) EXPECT_EQ(penrose_map(t.graph()), t);
}

TEST(PenroseMap, Triangle) {
  Graph g{3, 0};
  g.add({1, 2});
  g.add({1, 3});
  g.add({2, 3});
  EXPECT_EQ(penrose_map(g), (Tree{3, {{1, 2}, {1, 3}}}));
  Graph disconnected{3, 0};
  disconnected.add({1, 2});
  EXPECT_THROW(penrose_map(disconnected), std::invalid_argument);
}

TEST(CompatibleLines, SmallCases) {
  Graph star = compatible_lines(Tree{3, {{1, 2}, {1, 3}}});
  EXPECT_EQ(star.edges(), (std::vector<Edge>{{2, 3}}));
  EXPECT_EQ(compatible_lines(Tree{3, {{1, 2}, {2, 3}}}).edge_count(), 0);
  // chain 1-3-2: vertex 2 hangs below 3, nothing else in layer 1
  EXPECT_EQ(compatible_lines(Tree{3, {{1, 3}, {2, 3}}}).edge_count(), 0);
}

TEST(CompatibleLines, DisjointFromTree) {
  for (int p = 2; p <= 6; ++p)
    for (const auto& t : enumerate_trees(p)) EXPECT_EQ(t.graph().mask & compatible_lines(t).mask, 0U);
}

TEST(CompatibleLines, PreimagesOfPenroseMap) {
  for (int p = 2; p <= 5; ++p)
    for (const auto& t : enumerate_trees(p)) {
      const Graph hs = compatible_lines(t);
      for (std::uint64_t sub = hs.mask;; sub = (sub - 1) & hs.mask) {
        EXPECT_EQ(penrose_map(Graph{p, t.graph().mask | sub}), t);
        if (sub == 0) break;
      }
    }
}

TEST(VerifyPartition, Counts) {
  const std::uint64_t expected[] = {0, 0, 1, 4, 38, 728};
  for (int p = 2; p <= 5; ++p) {
    auto r = verify_partition(p);
    EXPECT_TRUE(r.ok()) << "p=" << p;
    EXPECT_EQ(r.connected_graphs, expected[p]);
    EXPECT_EQ(r.tree_family_total, expected[p]);
  }
  // p = 3: trees {12,13}, {12,23}, {13,23} contribute 2 + 1 + 1
  std::vector<std::uint64_t> sizes;
  for (const auto& t : enumerate_trees(3)) sizes.push_back(std::uint64_t{1} << compatible_lines(t).edge_count());
  std::sort(sizes.begin(), sizes.end());
  EXPECT_EQ(sizes, (std::vector<std::uint64_t>{1, 1, 2}));
}

TEST(LayeredOrder, FigureExample) {
  // 2, 3 in layer 1; 4, 5, 7 children of 2; 6, 8 children of 3
  Tree t = tree_from_edges(8, {{1, 2}, {1, 3}, {2, 4}, {2, 5}, {2, 7}, {3, 6}, {3, 8}});
  EXPECT_EQ(layered_order(t), (std::vector<int>{1, 2, 3, 4, 5, 7, 6, 8}));
  std::map<Edge, Rational> s;
  for (const auto& e : t.edges) s[e] = Rational(1, 2);
  auto r = band_matrix_analysis(t, s);
  EXPECT_TRUE(r.band_structure);
  // only lines from {4,5,7} up to 3 join layers 1 and 2 besides the tree
  auto hs = compatible_lines(t);
  EXPECT_TRUE(hs.has({3, 4}) && hs.has({3, 5}) && hs.has({3, 7}));
  EXPECT_FALSE(hs.has({2, 6}) || hs.has({2, 8}));
}

TEST(BandMatrix, NaiveCounterexample) {
  Tree t{3, {{1, 2}, {1, 3}}};
  auto r = band_matrix_analysis(t, {{{1, 2}, Rational(1)}, {{1, 3}, Rational(0)}});
  EXPECT_EQ(r.matrix, (Matrix<Rational>{{1, 1, 0}, {1, 1, 1}, {0, 1, 1}}));
  EXPECT_EQ(r.determinant, Rational(-1));
  EXPECT_FALSE(r.certificate.psd);
  EXPECT_FALSE(r.psd_by_charpoly);
  EXPECT_LT(r.min_eigenvalue, 0.0);
}

TEST(BandMatrix, AllOnesAndAllZeros) {
  // s = 1 gives the all-ones matrix exactly when T u H*(T) is complete, which
  // is the case for the star around the root.
  for (const auto& t : enumerate_trees(4)) {
    std::map<Edge, Rational> ones;
    for (const auto& e : t.edges) ones[e] = 1;
    auto r1 = band_matrix_analysis(t, ones);
    const bool complete = (t.graph().mask | compatible_lines(t).mask) == (std::uint64_t{1} << pair_count(4)) - 1;
    EXPECT_EQ(r1.matrix == Matrix<Rational>(4, 4, Rational(1)), complete);
    if (complete) {
      EXPECT_TRUE(r1.certificate.psd && r1.psd_by_charpoly);
    }
    EXPECT_TRUE(r1.band_structure);
  }
  Tree star{4, {{1, 2}, {1, 3}, {1, 4}}};
  std::map<Edge, Rational> zeros;
  for (const auto& e : star.edges) zeros[e] = 0;
  auto r0 = band_matrix_analysis(star, zeros);
  Matrix<Rational> blocks(4, 4, Rational(1));
  for (std::size_t i = 1; i < 4; ++i) blocks(0, i) = blocks(i, 0) = 0;
  EXPECT_EQ(r0.matrix, blocks);
  EXPECT_TRUE(r0.certificate.psd && r0.psd_by_charpoly);
  // the chain 1-2-3 at s = 1 is the det = -1 matrix again
  auto chain = band_matrix_analysis(Tree{3, {{1, 2}, {2, 3}}}, {{{1, 2}, Rational(1)}, {{2, 3}, Rational(1)}});
  EXPECT_EQ(chain.determinant, Rational(-1));
}

TEST(PsdRoutes, AgreeOnRandomSymmetric) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = static_cast<std::size_t>(trial % 4 + 1);
    Matrix<Rational> m = trial % 2 ? random_psd_matrix(rng, n, static_cast<std::size_t>(trial % 3 + 1))
                                   : random_rational_matrix(rng, n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) m(i, j) = m(j, i);
    EXPECT_EQ(ldlt_certificate(m).psd, psd_by_charpoly(m));
    if (trial % 2) {
      EXPECT_TRUE(ldlt_certificate(m).psd);
    }
  }
}

TEST(DirectResummation, PairIsSingleTree) {
  Rng rng(7);
  Universe u{2, 0};
  Covariance<Rational> cov(random_rational_matrix(rng, 2, 2));
  E v1 = E::product_of(u, {psibar(0), psi(0)}, Rational(1));
  E v2 = E::product_of(u, {psibar(1), psi(1)}, Rational(1));
  EXPECT_EQ(direct_resummation(cov, {v1, v2}), truncated_correlation(cov, {v1, v2}));
  EXPECT_EQ(direct_resummation(cov, {v1, v2}).constant_term(), -cov(0, 1) * cov(1, 0));
}

TEST(DirectResummation, ConstantsGiveZero) {
  Universe u{2, 0};
  Covariance<Rational> cov(Matrix<Rational>{{1, 2}, {3, 4}});
  for (int p = 2; p <= 4; ++p) {
    std::vector<E> vs(static_cast<std::size_t>(p), E::constant(u, Rational(5)));
    EXPECT_TRUE(direct_resummation(cov, vs).is_zero());
  }
}

TEST(DirectResummation, MatchesTruncatedCorrelation) {
  Rng rng(9);
  for (int trial = 0; trial < 16; ++trial) {
    const int n = trial % 3 + 1;
    const int p = trial % 3 + 2;
    Universe u{n, 0};
    Covariance<Rational> cov(random_rational_matrix(rng, static_cast<std::size_t>(n), static_cast<std::size_t>(n)));
    std::vector<E> vs;
    for (int q = 0; q < p; ++q) vs.push_back(random_even_element(rng, u, 4, n == 3 ? 0.08 : 0.3, true));
    EXPECT_EQ(direct_resummation(cov, vs), truncated_correlation(cov, vs)) << "trial " << trial;
  }
}

TEST(TreeIntegralQuadrature, MatchesExactWithinRounding) {
  Rng rng(13);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = trial % 2 + 1;
    const int p = trial % 2 + 2;
    Universe u{n, 0};
    Matrix<Rational> c = random_rational_matrix(rng, static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    std::vector<E> vs;
    for (int q = 0; q < p; ++q) vs.push_back(random_even_element(rng, u, 4, 0.4, true));
    auto exact = truncated_correlation(Covariance<Rational>(c), vs);
    std::vector<GrassmannElement<double>> vd;
    for (const auto& v : vs) vd.push_back(v.map_coefficients([](const Rational& x) { return x.get_d(); }));
    auto approx = tree_integral_quadrature(Covariance<double>(to_double(c)), vd);
    auto diff = approx - exact.map_coefficients([](const Rational& x) { return x.get_d(); });
    for (const auto& [m, coeff] : diff.terms()) EXPECT_NEAR(coeff, 0.0, 1e-9);
  }
}
