#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "msgt/mvgnn.hpp"
#include "msgt/sampler.hpp"

namespace msgt {

// Multi-head self-attention projections. The configured output width is split
// evenly across heads; concatenating head outputs restores it.
struct GtParams {
  std::vector<Tensor> w_query;  // per head, D' x (dim / heads)
  std::vector<Tensor> w_key;
  std::vector<Tensor> w_value;
  int heads = 4;
  int dim = 64;

  int head_dim() const { return dim / heads; }
};

GtParams init_gt(int input_dim, int dim, int heads, std::uint64_t seed);

// Multi-view feature rows for the sampled gene set: row v = the view-wise
// concatenation of final features, a zero block where v is absent from a
// view. core_mask marks rows whose gene belongs to the SL view.
struct AssembledBatch {
  Tensor features;             // |union_ids| x M*D_L
  std::vector<int> row_ids;    // global ids, one per row
  std::vector<bool> core_mask;
};

AssembledBatch assemble_features(const ViewFeatures& vf, const SampledBatch& batch,
                                 const MultiViewGraph& mv);

struct HeadProjection {
  Tensor query, key, value;
};

std::vector<HeadProjection> qkv(const AssembledBatch& ab, const GtParams& params);

// Scaled dot-product attention per head, heads concatenated column-wise.
// Dense over all rows: every sampled gene attends to every other.
Tensor attention(const std::vector<HeadProjection>& heads);

// Attention weights of a single head (softmax(Q K^T / sqrt(d_h))), used by the
// debug dump and the weight-row tests.
Tensor attention_weights(const HeadProjection& head);

}  // namespace msgt
