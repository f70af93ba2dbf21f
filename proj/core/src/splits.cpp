#include "msgt/splits.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include "msgt/rng.hpp"

namespace msgt {

SplitMode split_mode_from_string(const std::string& name) {
  if (name == "pair_out") return SplitMode::kPairOut;
  if (name == "gene_out") return SplitMode::kGeneOut;
  throw std::invalid_argument("unknown split mode: " + name +
                              " (expected pair_out or gene_out)");
}

std::string to_string(SplitMode m) {
  return m == SplitMode::kPairOut ? "pair_out" : "gene_out";
}

namespace {

// Uniform non-edge pairs from a candidate gene list, avoiding every known
// positive and anything already used. Appends `count` pairs to `out`.
void sample_negatives(const GeneGraph& sl, const std::vector<int>& genes,
                      const std::set<GenePair>& all_positives,
                      std::set<GenePair>& used, int count, Rng& rng,
                      std::vector<GenePair>& out,
                      const std::function<bool(const GenePair&)>& admissible) {
  if (genes.size() < 2 && count > 0)
    throw std::runtime_error("negative sampling: fewer than two candidate genes");
  const std::uint64_t n = genes.size();
  long long attempts = 0;
  const long long attempt_cap = 2000LL * count + 10000;
  int produced = 0;
  while (produced < count) {
    if (++attempts > attempt_cap)
      throw std::runtime_error(
          "negative sampling: candidate space too small for the requested ratio");
    const int a = genes[rng.below(n)];
    const int b = genes[rng.below(n)];
    if (a == b) continue;
    const GenePair p = make_pair_sorted(a, b);
    if (all_positives.count(p) || used.count(p)) continue;
    if (!admissible(p)) continue;
    used.insert(p);
    out.push_back(p);
    ++produced;
  }
}

std::array<int, 3> split_sizes(int n, const SplitSpec& spec) {
  const int n_train = static_cast<int>(std::floor(spec.train_ratio * n));
  const int n_val = static_cast<int>(std::floor(spec.val_ratio * n));
  return {n_train, n_val, n - n_train - n_val};
}

}  // namespace

EdgeDataset split_pairs(const GeneGraph& sl, const SplitSpec& spec) {
  if (spec.mode != SplitMode::kPairOut)
    throw std::invalid_argument("split_pairs: spec mode is not pair_out");
  std::vector<GenePair> edges(sl.edges().begin(), sl.edges().end());
  if (edges.size() < 10)
    throw std::runtime_error("split_pairs: need at least 10 positive edges, have " +
                             std::to_string(edges.size()));

  Rng rng(derive_seed(spec.seed, {0x5b1175ULL}));
  rng.shuffle(edges);

  EdgeDataset ds;
  ds.mode = SplitMode::kPairOut;
  const auto sizes = split_sizes(static_cast<int>(edges.size()), spec);
  int offset = 0;
  for (int s = 0; s < 3; ++s) {
    ds.positives[s].assign(edges.begin() + offset, edges.begin() + offset + sizes[s]);
    offset += sizes[s];
  }

  std::set<GenePair> all_positives(edges.begin(), edges.end());
  std::set<GenePair> used;
  std::vector<int> genes(sl.node_count());
  for (int i = 0; i < sl.node_count(); ++i) genes[i] = i;
  auto any = [](const GenePair&) { return true; };
  for (int s : {kVal, kTest}) {
    const int count = static_cast<int>(
        std::llround(spec.neg_ratio * static_cast<double>(ds.positives[s].size())));
    sample_negatives(sl, genes, all_positives, used, count, rng, ds.negatives[s], any);
  }
  return ds;
}

EdgeDataset split_genes(const GeneGraph& sl, const SplitSpec& spec) {
  if (spec.mode != SplitMode::kGeneOut)
    throw std::invalid_argument("split_genes: spec mode is not gene_out");
  const int n = sl.node_count();
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  Rng rng(derive_seed(spec.seed, {0x6e0175ULL}));
  rng.shuffle(order);

  EdgeDataset ds;
  ds.mode = SplitMode::kGeneOut;
  ds.gene_split.assign(n, kTrain);
  const auto sizes = split_sizes(n, spec);
  for (int i = 0; i < n; ++i) {
    const int pos = i;
    int split = kTrain;
    if (pos >= sizes[kTrain]) split = pos < sizes[kTrain] + sizes[kVal] ? kVal : kTest;
    ds.gene_split[order[i]] = split;
  }

  auto side = [&](int gene) { return ds.gene_split[gene]; };
  for (const auto& e : sl.edges()) {
    const int sa = side(e.first), sb = side(e.second);
    if (sa == kTrain && sb == kTrain) {
      ds.positives[kTrain].push_back(e);
    } else if ((sa == kTest || sb == kTest) && sa != kVal && sb != kVal) {
      ds.positives[kTest].push_back(e);
    } else if ((sa == kVal || sb == kVal) && sa != kTest && sb != kTest) {
      ds.positives[kVal].push_back(e);
    }
    // val-test straddling edges are dropped
  }
  for (int s = 0; s < 3; ++s)
    if (ds.positives[s].empty())
      throw std::runtime_error("split_genes: split " + std::to_string(s) +
                               " received zero positive edges; try a different seed");

  std::set<GenePair> all_positives(sl.edges().begin(), sl.edges().end());
  std::set<GenePair> used;
  std::vector<int> genes(n);
  for (int i = 0; i < n; ++i) genes[i] = i;

  const std::array<std::function<bool(const GenePair&)>, 3> rules = {
      [&](const GenePair& p) { return side(p.first) == kTrain && side(p.second) == kTrain; },
      [&](const GenePair& p) {
        const int a = side(p.first), b = side(p.second);
        return (a == kVal || b == kVal) && a != kTest && b != kTest;
      },
      [&](const GenePair& p) {
        const int a = side(p.first), b = side(p.second);
        return (a == kTest || b == kTest) && a != kVal && b != kVal;
      }};
  for (int s : {kVal, kTest}) {
    const int count = static_cast<int>(
        std::llround(spec.neg_ratio * static_cast<double>(ds.positives[s].size())));
    sample_negatives(sl, genes, all_positives, used, count, rng, ds.negatives[s],
                     rules[s]);
  }
  return ds;
}

GeneGraph masked_sl_graph(const GeneGraph& sl,
                          const std::vector<GenePair>& train_positives) {
  GeneGraph g(sl.vocab());
  for (const auto& [a, b] : train_positives) g.add_edge(a, b);
  return g;
}

}  // namespace msgt
