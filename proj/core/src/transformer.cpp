#include "msgt/transformer.hpp"

#include <cmath>
#include <stdexcept>

#include "msgt/rng.hpp"

namespace msgt {

GtParams init_gt(int input_dim, int dim, int heads, std::uint64_t seed) {
  if (heads < 1) throw std::invalid_argument("init_gt: need at least one head");
  if (dim % heads != 0)
    throw std::invalid_argument("init_gt: dim " + std::to_string(dim) +
                                " not divisible by heads " + std::to_string(heads));
  GtParams p;
  p.heads = heads;
  p.dim = dim;
  const int hd = p.head_dim();
  for (int h = 0; h < heads; ++h) {
    p.w_query.push_back(glorot(input_dim, hd, derive_seed(seed, {0x91ULL, static_cast<std::uint64_t>(h)})));
    p.w_key.push_back(glorot(input_dim, hd, derive_seed(seed, {0x92ULL, static_cast<std::uint64_t>(h)})));
    p.w_value.push_back(glorot(input_dim, hd, derive_seed(seed, {0x93ULL, static_cast<std::uint64_t>(h)})));
  }
  return p;
}

AssembledBatch assemble_features(const ViewFeatures& vf, const SampledBatch& batch,
                                 const MultiViewGraph& mv) {
  if (batch.union_ids.empty())
    throw std::invalid_argument("assemble_features: empty sampled batch");
  if (static_cast<int>(vf.per_view.size()) != mv.view_count())
    throw std::invalid_argument("assemble_features: view features missing");

  AssembledBatch out;
  out.row_ids = batch.union_ids;
  out.core_mask.reserve(batch.union_ids.size());
  for (int g : batch.union_ids) out.core_mask.push_back(mv.in_view(0, g));

  std::vector<Tensor> blocks;
  blocks.reserve(mv.view_count());
  for (int view = 0; view < mv.view_count(); ++view) {
    std::vector<int> local_ids;
    local_ids.reserve(batch.union_ids.size());
    for (int g : batch.union_ids) local_ids.push_back(mv.to_local(view, g));
    blocks.push_back(gather_rows_or_zero(vf.per_view[view], local_ids));
  }
  out.features = concat_cols(blocks);
  return out;
}

std::vector<HeadProjection> qkv(const AssembledBatch& ab, const GtParams& params) {
  if (params.w_query.empty()) throw std::invalid_argument("qkv: uninitialized params");
  if (params.w_query[0].rows() != ab.features.cols())
    throw std::invalid_argument("qkv: projection expects " +
                                std::to_string(params.w_query[0].rows()) +
                                " input columns, batch has " +
                                std::to_string(ab.features.cols()));
  std::vector<HeadProjection> heads;
  heads.reserve(params.heads);
  for (int h = 0; h < params.heads; ++h) {
    heads.push_back({matmul(ab.features, params.w_query[h]),
                     matmul(ab.features, params.w_key[h]),
                     matmul(ab.features, params.w_value[h])});
  }
  return heads;
}

Tensor attention_weights(const HeadProjection& head) {
  const double inv_scale = 1.0 / std::sqrt(static_cast<double>(head.query.cols()));
  return softmax_rows(scale(matmul(head.query, transpose(head.key)), inv_scale));
}

Tensor attention(const std::vector<HeadProjection>& heads) {
  if (heads.empty()) throw std::invalid_argument("attention: no heads");
  std::vector<Tensor> outputs;
  outputs.reserve(heads.size());
  for (const HeadProjection& h : heads) {
    if (h.query.rows() != h.key.rows() || h.key.rows() != h.value.rows() ||
        h.query.cols() != h.key.cols())
      throw std::invalid_argument("attention: inconsistent head shapes");
    outputs.push_back(matmul(attention_weights(h), h.value));
  }
  return concat_cols(outputs);
}

}  // namespace msgt
