#include "msgt/model.hpp"

#include <stdexcept>

#include "msgt/rng.hpp"

namespace msgt {

ModelParams init_model(const ModelConfig& cfg, std::uint64_t seed) {
  if (cfg.feature_dim <= 0) throw std::invalid_argument("init_model: feature_dim not set");
  if (cfg.views < 1) throw std::invalid_argument("init_model: need at least one view");
  ModelParams p;
  p.config = cfg;
  if (cfg.ablate.use_mvgnn) {
    std::vector<int> dims;
    dims.push_back(cfg.feature_dim);
    dims.insert(dims.end(), cfg.mvgnn_dims.begin(), cfg.mvgnn_dims.end());
    p.mvgnn = init_mvgnn(cfg.views, static_cast<int>(cfg.mvgnn_dims.size()), dims,
                         cfg.activation, derive_seed(seed, {1}), cfg.mvgnn_bias);
  }
  const int d_in = cfg.assembled_dim();
  if (cfg.ablate.use_gt) {
    p.gt = init_gt(d_in, cfg.gt_dim, cfg.gt_heads, derive_seed(seed, {2}));
  } else {
    p.bypass_proj = glorot(d_in, cfg.gt_dim, derive_seed(seed, {3}));
  }
  p.clf = init_classifier(cfg.pair_dim(), derive_seed(seed, {4}));
  return p;
}

std::vector<std::pair<std::string, Tensor*>> ModelParams::named_tensors() {
  std::vector<std::pair<std::string, Tensor*>> out;
  for (int l = 0; l < mvgnn.layer_count(); ++l) {
    for (int i = 0; i < mvgnn.view_count(); ++i)
      out.emplace_back("mvgnn.l" + std::to_string(l) + ".v" + std::to_string(i) + ".w",
                       &mvgnn.weights[l][i]);
    if (mvgnn.use_bias)
      out.emplace_back("mvgnn.l" + std::to_string(l) + ".b", &mvgnn.biases[l]);
  }
  for (std::size_t h = 0; h < gt.w_query.size(); ++h) {
    out.emplace_back("gt.h" + std::to_string(h) + ".q", &gt.w_query[h]);
    out.emplace_back("gt.h" + std::to_string(h) + ".k", &gt.w_key[h]);
    out.emplace_back("gt.h" + std::to_string(h) + ".v", &gt.w_value[h]);
  }
  if (!bypass_proj.empty()) out.emplace_back("bypass.w", &bypass_proj);
  out.emplace_back("clf.w", &clf.weight);
  return out;
}

std::vector<std::pair<std::string, const Tensor*>> ModelParams::named_tensors() const {
  std::vector<std::pair<std::string, const Tensor*>> out;
  auto mutable_view = const_cast<ModelParams*>(this)->named_tensors();
  out.reserve(mutable_view.size());
  for (auto& [name, t] : mutable_view) out.emplace_back(name, t);
  return out;
}

ModelParams ModelParams::deep_copy() const {
  ModelParams copy;
  copy.config = config;
  copy.mvgnn.activation = mvgnn.activation;
  copy.mvgnn.use_bias = mvgnn.use_bias;
  copy.mvgnn.weights.resize(mvgnn.weights.size());
  for (std::size_t l = 0; l < mvgnn.weights.size(); ++l)
    for (const Tensor& w : mvgnn.weights[l]) copy.mvgnn.weights[l].push_back(w.clone());
  for (const Tensor& b : mvgnn.biases) copy.mvgnn.biases.push_back(b.clone());
  copy.gt.heads = gt.heads;
  copy.gt.dim = gt.dim;
  for (const Tensor& t : gt.w_query) copy.gt.w_query.push_back(t.clone());
  for (const Tensor& t : gt.w_key) copy.gt.w_key.push_back(t.clone());
  for (const Tensor& t : gt.w_value) copy.gt.w_value.push_back(t.clone());
  if (!bypass_proj.empty()) copy.bypass_proj = bypass_proj.clone();
  copy.clf.weight = clf.weight.clone();
  return copy;
}

void watch_all(Tape& tape, ModelParams& params) {
  for (auto& [name, tensor] : params.named_tensors()) tape.watch(*tensor);
}

BatchForward run_pipeline(const MultiViewGraph& mv,
                          const std::vector<SparseMatrix>& adjacencies,
                          const Tensor& features, const ModelParams& params,
                          const SampledBatch& batch) {
  const AblationFlags& flags = params.config.ablate;

  ViewFeatures vf;
  if (flags.use_mvgnn) {
    vf = mvgnn_forward(mv, adjacencies, features, params.mvgnn);
  } else {
    // raw normalized features stand in for the aggregated ones
    vf.per_view.reserve(mv.view_count());
    for (int i = 0; i < mv.view_count(); ++i)
      vf.per_view.push_back(gather_rows(features, mv.local_to_global(i)));
  }

  AssembledBatch ab = assemble_features(vf, batch, mv);

  Tensor encoded;
  if (flags.use_gt) {
    encoded = attention(qkv(ab, params.gt));
  } else {
    encoded = matmul(ab.features, params.bypass_proj);
  }

  auto [core, ids] = extract_core(encoded, ab);
  return BatchForward{std::move(core), std::move(ids)};
}

}  // namespace msgt
