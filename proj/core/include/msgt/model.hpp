#pragma once

#include <string>
#include <utility>
#include <vector>

#include "msgt/mvgnn.hpp"
#include "msgt/predictor.hpp"
#include "msgt/sampler.hpp"
#include "msgt/transformer.hpp"

namespace msgt {

struct AblationFlags {
  bool use_mvgnn = true;
  bool use_sampling = true;
  bool use_gt = true;
  bool use_omics = true;
};

// Shape-determining settings for parameter construction.
struct ModelConfig {
  int views = 1;
  int feature_dim = 0;             // D0, from the feature table
  std::vector<int> mvgnn_dims;     // hidden dims, e.g. {128, 64}
  Activation activation = Activation::kRelu;
  bool mvgnn_bias = false;
  int gt_dim = 64;
  int gt_heads = 4;
  // Append an element-wise product block to the pairwise features. Plain
  // concatenation under the linear classifier yields purely additive pair
  // scores; the product term lets the classifier detect gene affinity.
  // Disable for the concatenation-only variant.
  bool pair_interaction = true;
  AblationFlags ablate;

  // Width of one gene's assembled multi-view row.
  int assembled_dim() const {
    const int d_last = ablate.use_mvgnn ? mvgnn_dims.back() : feature_dim;
    return views * d_last;
  }

  int pair_dim() const { return (pair_interaction ? 3 : 2) * gt_dim; }
};

// Every trainable matrix in one place. The bypass projection replaces the
// attention stack when the transformer is ablated.
struct ModelParams {
  ModelConfig config;
  MvgnnParams mvgnn;
  GtParams gt;
  Tensor bypass_proj;  // D' x gt_dim, used only when !use_gt
  ClassifierParams clf;

  // Stable (name, tensor) enumeration shared by the optimizer and the
  // checkpoint format.
  std::vector<std::pair<std::string, Tensor*>> named_tensors();
  std::vector<std::pair<std::string, const Tensor*>> named_tensors() const;

  ModelParams deep_copy() const;
};

ModelParams init_model(const ModelConfig& cfg, std::uint64_t seed);

// Registers every trainable tensor on the tape.
void watch_all(Tape& tape, ModelParams& params);

struct BatchForward {
  Tensor core_features;             // N'' x gt_dim
  std::vector<int> core_global_ids; // aligned with rows
};

// Full per-batch forward: multi-view aggregation (or raw features), feature
// assembly over the sampled set, attention (or bypass projection), core-row
// extraction. Differentiable end to end when params are watched on a tape.
BatchForward run_pipeline(const MultiViewGraph& mv,
                          const std::vector<SparseMatrix>& adjacencies,
                          const Tensor& features, const ModelParams& params,
                          const SampledBatch& batch);

}  // namespace msgt
