#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "msgt/model.hpp"
#include "msgt/splits.hpp"
#include "msgt/training.hpp"

namespace msgt {

// Every run setting in one flat struct. JSON files use nested objects
// (mvgnn.dims lives at {"mvgnn": {"dims": [...]}}); CLI flags override file
// values which override these defaults. Unknown JSON keys are rejected.
struct RunConfig {
  // data
  std::string sl_edges;
  std::vector<std::string> omics_edges;
  std::string features;
  std::string out_dir = "msgt_out";

  // mvgnn
  int mvgnn_layers = 2;
  std::vector<int> mvgnn_dims = {128, 64};
  std::string mvgnn_activation = "relu";
  bool mvgnn_bias = false;

  // sampler
  int batch_core = 100;
  int walk_len = 10;
  int cap = 500;
  int walks_per_gene = 1;

  // gt
  int gt_dim = 64;
  int gt_heads = 4;
  std::string dump_attention_csv;  // debug: first-batch attention weights

  // predictor
  bool pair_interaction = true;  // element-wise product block in pair features

  // train
  double lr = 1e-4;
  int patience = 20;
  int max_epochs = 500;
  double loss_neg_ratio = 0.0;

  // eval
  double eval_neg_ratio = 1.0;

  // split
  std::string split_mode = "pair_out";
  std::uint64_t split_seed = 0;

  // ablation: one of "", "mvgnn", "sampling", "gt", "omics"
  std::string ablate_without;

  std::uint64_t seed = 0;

  void validate() const;
  AblationFlags ablation_flags() const;
  std::string to_json() const;  // canonical snapshot for checkpoints
};

RunConfig config_from_json(const std::string& json_text);
RunConfig load_config_file(const std::string& path);

// MSGT_SEED, when set, overrides the configured seed.
void apply_env_overrides(RunConfig& cfg);

ModelConfig to_model_config(const RunConfig& cfg, int views, int feature_dim);
TrainConfig to_train_config(const RunConfig& cfg);
SplitSpec to_split_spec(const RunConfig& cfg);

}  // namespace msgt
