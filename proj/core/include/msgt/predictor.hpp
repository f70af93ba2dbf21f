#pragma once

#include <utility>
#include <vector>

#include "msgt/sampler.hpp"
#include "msgt/tensor.hpp"
#include "msgt/transformer.hpp"

namespace msgt {

// Binary edge classifier: 2 D'' inputs, logits for (non-SL, SL).
struct ClassifierParams {
  Tensor weight;  // 2*D'' x 2
};

ClassifierParams init_classifier(int pair_dim, std::uint64_t seed);

// Rows of the attention output whose genes belong to the SL view, plus their
// global ids in row order. Throws when the batch contains no core genes.
std::pair<Tensor, std::vector<int>> extract_core(const Tensor& attn_out,
                                                 const AssembledBatch& ab);

// Row (j, k) -> E(j) concatenated with E(k). Indices address rows of E.
// Self-pairs are rejected: the diagonal has no SL semantics.
//
// With include_product, an element-wise E(j)*E(k) block is appended (width
// 3 D''). Concatenation alone admits only additive pair scores under a linear
// classifier, which cannot express "these two genes belong together"; the
// product block is the minimal interaction term that can.
Tensor pair_features(const Tensor& core_features,
                     const std::vector<std::pair<int, int>>& pairs,
                     bool include_product = false);

Tensor edge_logits(const Tensor& pair_feats, const ClassifierParams& clf);

// Mean cross-entropy over the enumerated pairs (class 1 = SL).
Tensor batch_loss(const Tensor& logits, const std::vector<int>& labels);

// Inference-time SL probability, symmetrized over both row orderings. The
// feature layout (and so include_product) must match the classifier width.
double predict_pair(const Tensor& core_features, int j, int k,
                    const ClassifierParams& clf, bool include_product = false);

}  // namespace msgt
