#include <algorithm>
#include <set>
#include <sstream>

#include "doctest.h"
#include "msgt/sampler.hpp"
#include "test_helpers.hpp"

using namespace msgt;
using namespace msgt::testutil;

namespace {

GeneGraph cycle_graph(int n) {
  GeneVocab v;
  for (int i = 0; i < n; ++i) v.add("c" + std::to_string(i));
  GeneGraph g(v);
  for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
  return g;
}

GeneGraph graph_from(const std::string& text) {
  std::istringstream in(text);
  return load_view(in, "<memory>");
}

}  // namespace

TEST_SUITE_BEGIN("sampler");

TEST_CASE("transition probabilities follow 1/degree") {
  GeneGraph tri = triangle_graph();
  auto row = transition_probs(tri, 0);
  CHECK(row[0] == 0.0);
  CHECK(row[1] == doctest::Approx(0.5));
  CHECK(row[2] == doctest::Approx(0.5));

  GeneGraph path = path_graph(3);
  auto mid = transition_probs(path, 1);
  CHECK(mid[0] == doctest::Approx(0.5));
  CHECK(mid[1] == 0.0);
  CHECK(mid[2] == doctest::Approx(0.5));

  GeneVocab v;
  v.add("iso");
  v.add("x");
  v.add("y");
  GeneGraph g(v);
  g.add_edge(1, 2);
  auto zero = transition_probs(g, 0);
  for (double p : zero) CHECK(p == 0.0);

  // rows with neighbors sum to exactly the neighbor count / degree
  GeneGraph star = graph_from("hub a\nhub b\nhub c\n");
  auto hub = transition_probs(star, 0);
  double sum = 0.0;
  for (double p : hub) sum += p;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("random walk: length zero, truncation, start included") {
  Rng rng(1);
  GeneGraph path = path_graph(3);
  CHECK(random_walk(path, 1, 0, rng) == std::vector<int>{1});

  GeneVocab v;
  v.add("iso");
  v.add("x");
  v.add("y");
  GeneGraph g(v);
  g.add_edge(1, 2);
  CHECK(random_walk(g, 0, 10, rng) == std::vector<int>{0});

  auto walk = random_walk(path, 0, 5, rng);
  CHECK(walk.front() == 0);
  CHECK(walk.size() <= 6);
  for (std::size_t i = 1; i < walk.size(); ++i) {
    const auto& nb = neighbors(path, walk[i - 1]);
    CHECK(std::find(nb.begin(), nb.end(), walk[i]) != nb.end());
  }
}

TEST_CASE("single steps on a 5-cycle are close to uniform over both neighbors") {
  GeneGraph cyc = cycle_graph(5);
  Rng rng(42);
  int left = 0, right = 0;
  const int trials = 100000;
  for (int t = 0; t < trials; ++t) {
    auto w = random_walk(cyc, 0, 1, rng);
    REQUIRE(w.size() == 2);
    if (w[1] == 4) ++left;
    else if (w[1] == 1) ++right;
  }
  CHECK(left + right == trials);
  CHECK(std::abs(static_cast<double>(left) / trials - 0.5) < 0.02);
  CHECK(std::abs(static_cast<double>(right) / trials - 0.5) < 0.02);
}

TEST_CASE("empirical t-step distribution matches the exact chain") {
  // 6-node graph: path with a pendant triangle
  GeneGraph g = graph_from("a b\nb c\nc d\nd e\ne c\ne f\n");
  const int n = g.node_count();
  const int t_max = 3;
  const int walks = 50000;

  // exact chain: P^t applied to a delta at node 0
  std::vector<std::vector<double>> dist(t_max + 1, std::vector<double>(n, 0.0));
  dist[0][0] = 1.0;
  for (int t = 1; t <= t_max; ++t)
    for (int j = 0; j < n; ++j) {
      auto row = transition_probs(g, j);
      for (int k = 0; k < n; ++k) dist[t][k] += dist[t - 1][j] * row[k];
    }

  std::vector<std::vector<int>> counts(t_max + 1, std::vector<int>(n, 0));
  Rng rng(7);
  for (int w = 0; w < walks; ++w) {
    auto walk = random_walk(g, 0, t_max, rng);
    for (int t = 0; t <= t_max; ++t) counts[t][walk[t]]++;
  }
  for (int t = 1; t <= t_max; ++t) {
    double tv = 0.0;
    for (int k = 0; k < n; ++k)
      tv += std::abs(static_cast<double>(counts[t][k]) / walks - dist[t][k]);
    CHECK(tv / 2.0 < 0.02);
  }
}

TEST_CASE("cross-omics sampling degenerate cases") {
  GeneGraph sl = graph_from("a b\nb c\n");
  SamplerConfig cfg;
  cfg.walk_len = 10;
  cfg.seed = 5;

  // no omics views: S is exactly the core batch
  MultiViewGraph solo = build_multiview(sl, {});
  auto batch = sample_cross_omics({0, 1, 2}, solo, cfg);
  CHECK(batch.union_ids == std::vector<int>{0, 1, 2});

  // walk_len = 0 only revisits the core genes themselves
  GeneGraph omics = graph_from("a x\nx y\nb y\n");
  MultiViewGraph mv = build_multiview(sl, {omics});
  SamplerConfig zero = cfg;
  zero.walk_len = 0;
  auto none = sample_cross_omics({0, 1}, mv, zero);
  CHECK(none.union_ids == std::vector<int>{0, 1});
}

TEST_CASE("a shared hub neighbor is always sampled") {
  GeneGraph sl = graph_from("a b\nb c\n");
  // in both omics views, every core gene's only neighbor is the hub
  GeneGraph o1 = graph_from("a hub\nb hub\nc hub\n");
  GeneGraph o2 = graph_from("a hub\nb hub\nc hub\n");
  MultiViewGraph mv = build_multiview(sl, {o1, o2});
  const int hub = mv.global_vocab().id_of("hub");
  SamplerConfig cfg;
  cfg.walk_len = 4;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    cfg.seed = seed;
    auto batch = sample_cross_omics({0, 1, 2}, mv, cfg);
    CHECK(std::count(batch.union_ids.begin(), batch.union_ids.end(), hub) == 1);
    CHECK(batch.per_view_hits.size() == 2);
    CHECK(batch.per_view_hits[0] >= 1);
  }
}

TEST_CASE("cap_resample keeps core genes and respects the ceiling") {
  SampledBatch batch;
  for (int i = 0; i < 100; ++i) batch.core_ids.push_back(i);
  batch.union_ids = batch.core_ids;
  for (int i = 100; i < 620; ++i) batch.union_ids.push_back(i);

  SamplerConfig cfg;
  cfg.cap = 500;
  Rng rng(3);
  auto capped = cap_resample(batch, cfg, rng);
  CHECK(capped.union_ids.size() == 500);
  // all core genes retained, in order, at the front
  for (int i = 0; i < 100; ++i) CHECK(capped.union_ids[i] == i);
  // non-core tail is sorted and unique
  for (std::size_t i = 101; i < capped.union_ids.size(); ++i)
    CHECK(capped.union_ids[i] > capped.union_ids[i - 1]);

  // under the cap: unchanged
  SampledBatch small;
  small.core_ids = {5, 7};
  small.union_ids = {5, 7, 9, 11};
  auto same = cap_resample(small, cfg, rng);
  CHECK(same.union_ids == std::vector<int>{5, 7, 9, 11});

  // boundary: cap equals the core count, every non-core gene dropped
  SamplerConfig tight;
  tight.cap = 2;
  Rng rng2(4);
  auto only_core = cap_resample(small, tight, rng2);
  CHECK(only_core.union_ids == std::vector<int>{5, 7});
}

TEST_CASE("sample_batch is deterministic and never exceeds the cap") {
  GeneGraph sl = graph_from("a b\nb c\nc d\nd a\n");
  GeneGraph o1 = graph_from("a p\np q\nq r\nb q\nc r\nr s\ns t\nd t\n");
  MultiViewGraph mv = build_multiview(sl, {o1});
  SamplerConfig cfg;
  cfg.cap = 6;
  cfg.walk_len = 8;
  cfg.seed = 11;

  std::vector<int> core = {0, 1, 2, 3};
  auto b1 = sample_batch(core, mv, cfg, 0);
  auto b2 = sample_batch(core, mv, cfg, 0);
  CHECK(b1.union_ids == b2.union_ids);
  CHECK(b1.core_ids == b2.core_ids);

  for (std::uint64_t tag = 0; tag < 50; ++tag) {
    auto b = sample_batch(core, mv, cfg, tag);
    CHECK(b.union_ids.size() <= static_cast<std::size_t>(cfg.cap));
    // core retention
    std::set<int> ids(b.union_ids.begin(), b.union_ids.end());
    for (int c : core) CHECK(ids.count(c) == 1);
    // unique ids
    CHECK(ids.size() == b.union_ids.size());
  }
}

TEST_CASE("uniform fallback keeps the composition of the walked batch") {
  GeneGraph sl = graph_from("a b\nb c\nc d\nd a\n");
  GeneGraph o1 = graph_from("a p\np q\nq r\nb q\nc r\nr s\ns t\nd t\n");
  MultiViewGraph mv = build_multiview(sl, {o1});
  SamplerConfig cfg;
  cfg.cap = 6;
  cfg.walk_len = 8;
  cfg.seed = 11;
  std::vector<int> core = {0, 1, 2, 3};

  auto walked = sample_batch(core, mv, cfg, 3);
  auto uniform = sample_batch_uniform(core, mv, cfg, 3);
  CHECK(uniform.core_ids == walked.core_ids);
  CHECK(uniform.union_ids.size() == walked.union_ids.size());
  std::set<int> ids(uniform.union_ids.begin(), uniform.union_ids.end());
  CHECK(ids.size() == uniform.union_ids.size());
  for (int c : core) CHECK(ids.count(c) == 1);
}

TEST_SUITE_END();
