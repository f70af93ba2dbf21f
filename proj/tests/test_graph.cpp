#include <cmath>
#include <sstream>

#include "doctest.h"
#include "msgt/graph.hpp"
#include "msgt/rng.hpp"
#include "test_helpers.hpp"

using namespace msgt;
using namespace msgt::testutil;

namespace {

GeneGraph graph_from(const std::string& text, LoadStats* stats = nullptr) {
  std::istringstream in(text);
  return load_view(in, "<memory>", GeneVocab(), stats);
}

// Brute-force D^{-1/2} (A+I) D^{-1/2} straight from the edge set.
Tensor naive_normalized_adjacency(const GeneGraph& g) {
  const int n = g.node_count();
  Tensor a(n, n);
  for (const auto& [u, v] : g.edges()) {
    a.at(u, v) = 1.0;
    a.at(v, u) = 1.0;
  }
  for (int i = 0; i < n; ++i) a.at(i, i) = 1.0;
  std::vector<double> deg(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) deg[i] += a.at(i, j);
  Tensor out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out.at(i, j) = a.at(i, j) / std::sqrt(deg[i] * deg[j]);
  return out;
}

GeneGraph random_graph(int n, double p, std::uint64_t seed) {
  GeneVocab v;
  for (int i = 0; i < n; ++i) v.add("n" + std::to_string(i));
  GeneGraph g(v);
  Rng rng(seed);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform() < p) g.add_edge(i, j);
  return g;
}

}  // namespace

TEST_SUITE_BEGIN("graph");

TEST_CASE("load_view collapses duplicates and drops self-loops") {
  LoadStats stats;
  GeneGraph g = graph_from("a b\nb c\na b\n", &stats);
  CHECK(g.node_count() == 3);
  CHECK(g.edge_count() == 2);
  CHECK(stats.duplicates_collapsed == 1);
  CHECK(stats.self_loops_dropped == 0);
}

TEST_CASE("load_view rejects a file that is empty after self-loop removal") {
  CHECK_THROWS_WITH_AS(graph_from("a a\n"), doctest::Contains("empty edge set"),
                       std::runtime_error);
}

TEST_CASE("load_view reports malformed lines with their number") {
  CHECK_THROWS_WITH_AS(graph_from("a b\njustone\n"), doctest::Contains(":2"),
                       std::runtime_error);
}

TEST_CASE("load_view skips comments and keeps symbols case-sensitive") {
  GeneGraph g = graph_from("# comment\nBRCA1 parp1\nbrca1 PARP1\n");
  CHECK(g.node_count() == 4);
  CHECK(g.edge_count() == 2);
}

TEST_CASE("build_multiview: counts, union, membership") {
  GeneGraph sl = graph_from("a b\nb c\n");
  GeneGraph o1 = graph_from("b d\nd e\n");
  MultiViewGraph mv = build_multiview(sl, {o1});
  CHECK(mv.view_count() == 2);
  CHECK(mv.global_size() == 5);

  // SL view sits first; membership restricted to it covers exactly its vocab
  int sl_members = 0;
  for (int g = 0; g < mv.global_size(); ++g)
    if (mv.in_view(0, g)) ++sl_members;
  CHECK(sl_members == 3);

  // union of memberships covers the global vocab
  for (int g = 0; g < mv.global_size(); ++g) {
    bool any = false;
    for (int v = 0; v < mv.view_count(); ++v) any = any || mv.in_view(v, g);
    CHECK(any);
  }

  // local/global maps agree with membership
  CHECK(mv.to_local(1, mv.global_vocab().id_of("a")) == -1);
  const int d_global = mv.global_vocab().id_of("d");
  CHECK(mv.to_global(1, mv.to_local(1, d_global)) == d_global);
}

TEST_CASE("load_view can extend an existing vocabulary") {
  GeneGraph first = graph_from("a b\nb c\n");
  std::istringstream in("c d\nd a\n");
  GeneGraph second = load_view(in, "<memory>", first.vocab());
  // shared symbols keep their ids from the first view
  CHECK(second.vocab().id_of("a") == first.vocab().id_of("a"));
  CHECK(second.vocab().id_of("c") == first.vocab().id_of("c"));
  CHECK(second.vocab().size() == 4);
  CHECK(second.edge_count() == 2);
}

TEST_CASE("build_multiview with four omics views gives M = 5") {
  GeneGraph sl = graph_from("a b\nb c\n");
  std::vector<GeneGraph> omics;
  for (int i = 0; i < 4; ++i)
    omics.push_back(graph_from("a x" + std::to_string(i) + "\n"));
  MultiViewGraph mv = build_multiview(sl, omics);
  CHECK(mv.view_count() == 5);
}

TEST_CASE("build_multiview: single view and disjoint unions") {
  GeneGraph sl = graph_from("a b\nb c\n");
  MultiViewGraph alone = build_multiview(sl, {});
  CHECK(alone.view_count() == 1);
  for (int g = 0; g < alone.global_size(); ++g) CHECK(alone.in_view(0, g));

  GeneGraph three = graph_from("x y\ny z\n");
  GeneGraph four = graph_from("p q\nq r\nr s\n");
  MultiViewGraph mv = build_multiview(three, {four});
  CHECK(mv.global_size() == 7);
}

TEST_CASE("build_multiview rejects inconsistent casing") {
  GeneGraph sl = graph_from("BRCA1 TP53\n");
  GeneGraph omics = graph_from("brca1 MYC\n");
  CHECK_THROWS_WITH_AS(build_multiview(sl, {omics}), doctest::Contains("casing"),
                       std::runtime_error);
}

TEST_CASE("normalized adjacency hand cases") {
  // single edge: degrees with self-loops are (2, 2)
  GeneGraph pair = graph_from("a b\n");
  Tensor a = normalized_adjacency(pair);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(a.at(i, j) == doctest::Approx(0.5).epsilon(1e-12));

  // isolated node keeps only its self-loop entry
  GeneVocab v;
  v.add("alone");
  v.add("x");
  v.add("y");
  GeneGraph g(v);
  g.add_edge(1, 2);
  Tensor iso = normalized_adjacency(g);
  CHECK(iso.at(0, 0) == 1.0);
  CHECK(iso.at(0, 1) == 0.0);
  CHECK(iso.at(0, 2) == 0.0);

  Tensor tri = normalized_adjacency(triangle_graph());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(tri.at(i, j) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("normalized adjacency matches brute force on random graphs") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const int n = 2 + static_cast<int>(seed % 19);
    GeneGraph g = random_graph(n, 0.3, 1000 + seed);
    Tensor fast = normalized_adjacency(g);
    Tensor slow = naive_normalized_adjacency(g);
    CHECK(max_abs_diff(fast, slow) <= 1e-12);

    // sparse representation must agree with the dense definition
    Tensor sparse_dense = normalized_adjacency_sparse(g).to_dense();
    CHECK(max_abs_diff(fast, sparse_dense) == 0.0);

    // entries live in [0, 1], symmetric, zero raw diagonal handled via self-loop
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        CHECK(fast.at(i, j) >= 0.0);
        CHECK(fast.at(i, j) <= 1.0);
        CHECK(fast.at(i, j) == fast.at(j, i));
      }
  }
}

TEST_CASE("degree vector basics and handshake sum") {
  GeneGraph path = path_graph(3);
  auto d = degree_vector(path);
  CHECK(d == std::vector<int>{1, 2, 1});

  GeneVocab v;
  v.add("c");
  for (int i = 0; i < 4; ++i) v.add("leaf" + std::to_string(i));
  GeneGraph star(v);
  for (int i = 1; i <= 4; ++i) star.add_edge(0, i);
  auto ds = degree_vector(star);
  CHECK(ds[0] == 4);
  for (int i = 1; i <= 4; ++i) CHECK(ds[i] == 1);

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    GeneGraph g = random_graph(12, 0.25, 2000 + seed);
    int total = 0;
    for (int deg : degree_vector(g)) total += deg;
    CHECK(total == 2 * g.edge_count());
  }
}

TEST_CASE("neighbors are sorted, isolated nodes empty, range checked") {
  GeneGraph path = path_graph(3);
  CHECK(neighbors(path, 1) == std::vector<int>{0, 2});

  GeneVocab v;
  v.add("a");
  v.add("b");
  v.add("c");
  GeneGraph g(v);
  g.add_edge(0, 1);
  CHECK(neighbors(g, 2).empty());
  CHECK_THROWS_AS(neighbors(g, 3), std::out_of_range);
  CHECK_THROWS_AS(neighbors(g, -1), std::out_of_range);

  GeneGraph tri = triangle_graph();
  CHECK(neighbors(tri, 2) == std::vector<int>{0, 1});
}

TEST_CASE("raw adjacency is symmetric with zero diagonal") {
  GeneGraph g = random_graph(10, 0.4, 77);
  for (int i = 0; i < 10; ++i) {
    for (int j : neighbors(g, i)) {
      CHECK(i != j);
      const auto& back = neighbors(g, j);
      CHECK(std::find(back.begin(), back.end(), i) != back.end());
    }
  }
}

TEST_CASE("feature table: parse, missing values, zscore") {
  GeneVocab vocab;
  vocab.add("a");
  vocab.add("b");
  vocab.add("c");
  std::istringstream in("gene,f1,f2\na,1.0,2.0\nb,,4.0\nzzz,9,9\n");
  std::size_t missing = 0;
  FeatureTable t = load_features(in, "<memory>", vocab, &missing);
  CHECK(t.gene_count() == 3);
  CHECK(t.dim() == 2);
  CHECK(t.matrix().at(0, 0) == 1.0);
  CHECK(t.matrix().at(1, 0) == 0.0);  // empty field -> 0
  CHECK(t.matrix().at(1, 1) == 4.0);
  CHECK(missing == 1);  // gene c absent from the file

  t.zscore({0, 1});
  CHECK(t.matrix().at(0, 0) == doctest::Approx(1.0));
  CHECK(t.matrix().at(1, 0) == doctest::Approx(-1.0));

  // inf/nan tokens parse but are zeroed: ingestion never emits non-finite rows
  std::istringstream weird("gene,f1,f2\na,inf,nan\nb,1,2\n");
  FeatureTable tw = load_features(weird, "<memory>", vocab, nullptr);
  CHECK(tw.matrix().at(0, 0) == 0.0);
  CHECK(tw.matrix().at(0, 1) == 0.0);

  std::istringstream bad("gene,f1\na,notanumber\n");
  CHECK_THROWS_WITH_AS(load_features(bad, "<memory>", vocab, nullptr),
                       doctest::Contains("non-numeric"), std::runtime_error);

  std::istringstream bad_header("id,f1\na,1\n");
  CHECK_THROWS_AS(load_features(bad_header, "<memory>", vocab, nullptr),
                  std::runtime_error);
}

TEST_SUITE_END();
