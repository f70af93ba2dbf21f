#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "msgt/metrics.hpp"
#include "msgt/model.hpp"
#include "msgt/splits.hpp"

namespace msgt {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Moments aligned with ModelParams::named_tensors() order.
struct OptimizerState {
  AdamConfig cfg;
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  long step = 0;
};

OptimizerState init_optimizer(const ModelParams& params, const AdamConfig& cfg);

// Standard bias-corrected Adam update, in place. Gradients must align with
// named_tensors() order; a non-finite gradient aborts with the tensor's name.
void adam_step(ModelParams& params, const std::vector<Tensor>& grads,
               OptimizerState& state);

struct TrainConfig {
  SamplerConfig sampler;
  AdamConfig adam;
  int max_epochs = 500;
  int patience = 20;
  double loss_neg_ratio = 0.0;  // 0 = full ordered pair grid per batch
  std::uint64_t seed = 0;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_acc = 0.0;
  double val_f1 = 0.0;
  double val_auc = 0.0;
};

struct TrainResult {
  ModelParams params;       // best-validation checkpoint
  OptimizerState opt_state; // optimizer moments at that epoch
  std::vector<EpochRecord> history;
  int best_epoch = -1;
  double best_val_auc = 0.0;
};

// Tracks the running best validation score; stop() flips after `patience`
// non-improving epochs (patience 0 stops on the first one).
class EarlyStopper {
 public:
  explicit EarlyStopper(int patience) : patience_(patience) {}
  // Returns true when `score` strictly improves the best seen.
  bool offer(double score) {
    if (!has_best_ || score > best_) {
      best_ = score;
      has_best_ = true;
      stale_ = 0;
      return true;
    }
    ++stale_;
    return false;
  }
  bool stop() const { return has_best_ && stale_ > patience_; }
  double best() const { return best_; }

 private:
  int patience_;
  int stale_ = 0;
  double best_ = 0.0;
  bool has_best_ = false;
};

// Full training loop: per epoch, shuffle the trainable core genes, sample
// batches, optimize the batch loss over ordered core pairs, then score the
// validation split and early-stop on its ROC-AUC. Returns the parameters of
// the best validation epoch.
TrainResult train(const MultiViewGraph& mv, const FeatureTable& features,
                  const EdgeDataset& dataset, const ModelConfig& model_cfg,
                  const TrainConfig& train_cfg);

// Scores every labeled pair of a split. Evaluation batches are seeded from
// the evaluation genes themselves so both pair endpoints are present as core
// rows; sampling then adds walk context around them.
MetricsReport evaluate_split(const ModelParams& params, const MultiViewGraph& mv,
                             const FeatureTable& features, const EdgeDataset& dataset,
                             int split, const TrainConfig& train_cfg);

// Pair scores in the order given (probability of SL per pair).
std::vector<double> score_pairs(const ModelParams& params, const MultiViewGraph& mv,
                                const std::vector<SparseMatrix>& adjacencies,
                                const FeatureTable& features,
                                const std::vector<GenePair>& pairs,
                                const TrainConfig& train_cfg);

// Thrown for the one combination the method cannot support.
struct UnsupportedCombination : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Guards ablation/evaluation combinations: no omics views means no signal
// path to unseen genes, so the inductive protocol is rejected.
void check_supported(const AblationFlags& flags, SplitMode mode);

}  // namespace msgt
