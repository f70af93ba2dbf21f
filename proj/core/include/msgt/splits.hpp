#pragma once

#include <array>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "msgt/graph.hpp"

namespace msgt {

enum class SplitMode { kPairOut, kGeneOut };
SplitMode split_mode_from_string(const std::string& name);
std::string to_string(SplitMode m);

struct SplitSpec {
  SplitMode mode = SplitMode::kPairOut;
  // train : val : test, fixed 7:1:2
  double train_ratio = 0.7;
  double val_ratio = 0.1;
  std::uint64_t seed = 0;
  double neg_ratio = 1.0;  // val/test negatives per positive
};

constexpr int kTrain = 0;
constexpr int kVal = 1;
constexpr int kTest = 2;

// Unordered gene pair in SL-view local ids, stored (lo, hi).
using GenePair = std::pair<int, int>;
inline GenePair make_pair_sorted(int a, int b) {
  return a < b ? GenePair{a, b} : GenePair{b, a};
}

// Labeled pairs per split. Positives partition the SL edge set (pair_out) or
// follow the gene partition rules (gene_out). Negatives are sampled non-edges
// for val/test; training negatives come from batch pair enumeration instead.
struct EdgeDataset {
  SplitMode mode = SplitMode::kPairOut;
  std::array<std::vector<GenePair>, 3> positives;
  std::array<std::vector<GenePair>, 3> negatives;
  std::vector<int> gene_split;  // gene_out only: split index per SL gene

  std::set<GenePair> positive_set(int split) const {
    return {positives[split].begin(), positives[split].end()};
  }
};

// Transductive split: edges shuffled and partitioned 7:1:2.
EdgeDataset split_pairs(const GeneGraph& sl, const SplitSpec& spec);

// Inductive split: SL genes partitioned 7:1:2. Train positives keep edges
// with both endpoints in train; test positives have >=1 test endpoint and no
// val endpoint; val symmetrically. Val-test straddling edges are dropped.
EdgeDataset split_genes(const GeneGraph& sl, const SplitSpec& spec);

// SL graph restricted to the training positives (same vocab). This is the
// adjacency the GCN aggregation sees during training, so val/test edges
// cannot leak through message passing.
GeneGraph masked_sl_graph(const GeneGraph& sl, const std::vector<GenePair>& train_positives);

}  // namespace msgt
