#include "msgt/training.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "msgt/rng.hpp"

namespace msgt {

OptimizerState init_optimizer(const ModelParams& params, const AdamConfig& cfg) {
  OptimizerState st;
  st.cfg = cfg;
  for (const auto& [name, t] : params.named_tensors()) {
    st.m.emplace_back(t->rows(), t->cols());
    st.v.emplace_back(t->rows(), t->cols());
  }
  return st;
}

void adam_step(ModelParams& params, const std::vector<Tensor>& grads,
               OptimizerState& state) {
  auto named = params.named_tensors();
  if (named.size() != grads.size() || named.size() != state.m.size())
    throw std::invalid_argument("adam_step: parameter/gradient/moment count mismatch");
  ++state.step;
  const AdamConfig& c = state.cfg;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  for (std::size_t p = 0; p < named.size(); ++p) {
    auto& [name, tensor] = named[p];
    const auto& gv = grads[p].values();
    if (grads[p].rows() != tensor->rows() || grads[p].cols() != tensor->cols())
      throw std::invalid_argument("adam_step: gradient shape mismatch for " + name);
    auto& mv = state.m[p].values();
    auto& vv = state.v[p].values();
    auto& pv = tensor->values();
    for (std::size_t i = 0; i < pv.size(); ++i) {
      const double g = gv[i];
      if (!std::isfinite(g))
        throw std::runtime_error("adam_step: non-finite gradient in " + name +
                                 " at step " + std::to_string(state.step));
      mv[i] = c.beta1 * mv[i] + (1.0 - c.beta1) * g;
      vv[i] = c.beta2 * vv[i] + (1.0 - c.beta2) * g * g;
      const double m_hat = mv[i] / bc1;
      const double v_hat = vv[i] / bc2;
      pv[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
    }
  }
}

void check_supported(const AblationFlags& flags, SplitMode mode) {
  if (!flags.use_omics && mode == SplitMode::kGeneOut)
    throw UnsupportedCombination(
        "unsupported combination: the no-omics configuration cannot run under "
        "leave-gene-out; omics views are the only signal path to unseen genes");
}

namespace {

// Ordered core pairs of one batch with labels from the training positives.
// Row indices address `core_sl_locals`; -1 entries (genes outside the SL
// vocabulary) never occur since core rows are SL members by construction.
struct BatchPairs {
  std::vector<GenePair> rows;  // indices into the core feature rows
  std::vector<int> labels;
};

BatchPairs enumerate_pairs(const std::vector<int>& core_sl_locals,
                           const std::set<GenePair>& train_positives,
                           const std::vector<int>* gene_split, double neg_ratio,
                           Rng& rng) {
  const int n = static_cast<int>(core_sl_locals.size());
  std::vector<int> usable;
  for (int r = 0; r < n; ++r) {
    const int local = core_sl_locals[r];
    if (gene_split && (*gene_split)[local] != kTrain) continue;  // no unseen-gene pairs
    usable.push_back(r);
  }
  BatchPairs out;
  std::vector<GenePair> negatives;
  for (int a : usable) {
    for (int b : usable) {
      if (a == b) continue;
      const GenePair key = make_pair_sorted(core_sl_locals[a], core_sl_locals[b]);
      if (train_positives.count(key)) {
        out.rows.push_back({a, b});
        out.labels.push_back(1);
      } else {
        negatives.push_back({a, b});
      }
    }
  }
  if (neg_ratio > 0.0 && !out.rows.empty()) {
    const int want = std::min<int>(
        static_cast<int>(negatives.size()),
        static_cast<int>(std::llround(neg_ratio * static_cast<double>(out.rows.size()))));
    for (int idx : rng.sample_without_replacement(static_cast<int>(negatives.size()), want)) {
      out.rows.push_back(negatives[idx]);
      out.labels.push_back(0);
    }
  } else {
    for (const auto& p : negatives) {
      out.rows.push_back(p);
      out.labels.push_back(0);
    }
  }
  return out;
}

std::vector<SparseMatrix> training_adjacencies(const MultiViewGraph& mv,
                                               const EdgeDataset& dataset) {
  std::vector<SparseMatrix> adj = view_adjacencies(mv);
  adj[0] = normalized_adjacency_sparse(masked_sl_graph(mv.sl_view(),
                                                       dataset.positives[kTrain]));
  return adj;
}

// Evaluation pair groups: consecutive pairs whose union of endpoints fits in
// one core batch.
std::vector<std::vector<GenePair>> group_eval_pairs(const std::vector<GenePair>& pairs,
                                                    int batch_core) {
  std::vector<std::vector<GenePair>> groups;
  std::vector<GenePair> current;
  std::set<int> genes;
  for (const auto& p : pairs) {
    std::set<int> next = genes;
    next.insert(p.first);
    next.insert(p.second);
    if (!current.empty() && static_cast<int>(next.size()) > batch_core) {
      groups.push_back(current);
      current.clear();
      genes.clear();
      genes.insert(p.first);
      genes.insert(p.second);
    } else {
      genes = std::move(next);
    }
    current.push_back(p);
  }
  if (!current.empty()) groups.push_back(current);
  return groups;
}

}  // namespace

std::vector<double> score_pairs(const ModelParams& params, const MultiViewGraph& mv,
                                const std::vector<SparseMatrix>& adjacencies,
                                const FeatureTable& features,
                                const std::vector<GenePair>& pairs,
                                const TrainConfig& train_cfg) {
  std::vector<double> scores(pairs.size(), 0.0);
  if (pairs.empty()) return scores;

  // Deterministically mix the pair order before grouping so no batch is
  // composed of a single label class; each batch's attention context then
  // shifts both classes alike.
  std::vector<std::size_t> perm(pairs.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  Rng mix_rng(derive_seed(train_cfg.seed, {0x3a7fULL, pairs.size()}));
  mix_rng.shuffle(perm);
  std::vector<GenePair> mixed(pairs.size());
  for (std::size_t i = 0; i < perm.size(); ++i) mixed[i] = pairs[perm[i]];

  const auto groups = group_eval_pairs(mixed, train_cfg.sampler.batch_core);
  std::size_t cursor = 0;
  std::uint64_t group_tag = 0;
  for (const auto& group : groups) {
    // distinct endpoints in first-appearance order, as global ids
    std::vector<int> core;
    std::set<int> seen;
    for (const auto& p : group) {
      for (int local : {p.first, p.second}) {
        const int global = mv.to_global(0, local);
        if (seen.insert(global).second) core.push_back(global);
      }
    }
    SamplerConfig scfg = train_cfg.sampler;
    scfg.seed = derive_seed(train_cfg.seed, {0xe7a1ULL, group_tag});
    const SampledBatch batch =
        params.config.ablate.use_sampling
            ? sample_batch(core, mv, scfg, group_tag)
            : sample_batch_uniform(core, mv, scfg, group_tag);

    const BatchForward fwd = run_pipeline(mv, adjacencies, features.matrix(), params, batch);
    std::map<int, int> row_of;
    for (std::size_t r = 0; r < fwd.core_global_ids.size(); ++r)
      row_of[fwd.core_global_ids[r]] = static_cast<int>(r);

    for (const auto& p : group) {
      const int rj = row_of.at(mv.to_global(0, p.first));
      const int rk = row_of.at(mv.to_global(0, p.second));
      scores[perm[cursor++]] = predict_pair(fwd.core_features, rj, rk, params.clf,
                                            params.config.pair_interaction);
    }
    ++group_tag;
  }
  return scores;
}

namespace {

MetricsReport evaluate_with_adjacencies(const ModelParams& params,
                                        const MultiViewGraph& mv,
                                        const std::vector<SparseMatrix>& adjacencies,
                                        const FeatureTable& features,
                                        const EdgeDataset& dataset, int split,
                                        const TrainConfig& train_cfg) {
  std::vector<GenePair> pairs = dataset.positives[split];
  std::vector<int> labels(pairs.size(), 1);
  pairs.insert(pairs.end(), dataset.negatives[split].begin(),
               dataset.negatives[split].end());
  labels.resize(pairs.size(), 0);
  if (pairs.empty())
    throw std::runtime_error("evaluate_split: split " + std::to_string(split) +
                             " has no labeled pairs");
  const std::vector<double> scores =
      score_pairs(params, mv, adjacencies, features, pairs, train_cfg);
  return compute_metrics(scores, labels);
}

}  // namespace

MetricsReport evaluate_split(const ModelParams& params, const MultiViewGraph& mv,
                             const FeatureTable& features, const EdgeDataset& dataset,
                             int split, const TrainConfig& train_cfg) {
  return evaluate_with_adjacencies(params, mv, training_adjacencies(mv, dataset),
                                   features, dataset, split, train_cfg);
}

TrainResult train(const MultiViewGraph& mv, const FeatureTable& features,
                  const EdgeDataset& dataset, const ModelConfig& model_cfg,
                  const TrainConfig& train_cfg) {
  check_supported(model_cfg.ablate, dataset.mode);
  if (!model_cfg.ablate.use_omics && mv.view_count() != 1)
    throw std::invalid_argument("train: no-omics configuration requires a single view");

  ModelParams params = init_model(model_cfg, derive_seed(train_cfg.seed, {0x1717ULL}));
  OptimizerState opt = init_optimizer(params, train_cfg.adam);
  const auto adjacencies = training_adjacencies(mv, dataset);
  const std::set<GenePair> train_positives = dataset.positive_set(kTrain);
  const std::vector<int>* gene_split =
      dataset.mode == SplitMode::kGeneOut ? &dataset.gene_split : nullptr;

  // trainable core pool in global ids
  std::vector<int> pool;
  for (int local = 0; local < mv.sl_view().node_count(); ++local) {
    if (gene_split && (*gene_split)[local] != kTrain) continue;
    pool.push_back(mv.to_global(0, local));
  }
  if (pool.size() < 2) throw std::runtime_error("train: fewer than two trainable genes");

  TrainResult result;
  EarlyStopper stopper(train_cfg.patience);

  for (int epoch = 0; epoch < train_cfg.max_epochs; ++epoch) {
    Rng epoch_rng(derive_seed(train_cfg.seed, {0xe90cULL, static_cast<std::uint64_t>(epoch)}));
    std::vector<int> order = pool;
    epoch_rng.shuffle(order);

    double loss_sum = 0.0;
    int batches_used = 0;
    const int bsz = train_cfg.sampler.batch_core;
    for (std::size_t start = 0; start < order.size(); start += bsz) {
      const std::size_t stop = std::min(order.size(), start + bsz);
      std::vector<int> core(order.begin() + start, order.begin() + stop);
      if (core.size() < 2) continue;

      const std::uint64_t tag =
          (static_cast<std::uint64_t>(epoch) << 20) | (start / bsz);
      const SampledBatch batch = model_cfg.ablate.use_sampling
                                     ? sample_batch(core, mv, train_cfg.sampler, tag)
                                     : sample_batch_uniform(core, mv, train_cfg.sampler, tag);

      Tape tape;
      watch_all(tape, params);
      const BatchForward fwd =
          run_pipeline(mv, adjacencies, features.matrix(), params, batch);

      std::vector<int> core_sl_locals;
      core_sl_locals.reserve(fwd.core_global_ids.size());
      for (int g : fwd.core_global_ids) core_sl_locals.push_back(mv.to_local(0, g));

      Rng pair_rng(derive_seed(train_cfg.seed, {0x9a17ULL, tag}));
      const BatchPairs bp = enumerate_pairs(core_sl_locals, train_positives, gene_split,
                                            train_cfg.loss_neg_ratio, pair_rng);
      if (bp.rows.empty()) continue;

      Tensor loss = batch_loss(
          edge_logits(pair_features(fwd.core_features, bp.rows, model_cfg.pair_interaction),
                      params.clf),
          bp.labels);
      const double loss_value = loss.scalar();
      if (!std::isfinite(loss_value))
        throw std::runtime_error("train: loss diverged (non-finite) at epoch " +
                                 std::to_string(epoch));
      tape.backward(loss);

      std::vector<Tensor> grads;
      for (auto& [name, tensor] : params.named_tensors())
        grads.push_back(tape.grad(*tensor));
      adam_step(params, grads, opt);

      loss_sum += loss_value;
      ++batches_used;
    }
    if (batches_used == 0) throw std::runtime_error("train: no usable batches in epoch");

    const MetricsReport val = evaluate_with_adjacencies(params, mv, adjacencies, features,
                                                        dataset, kVal, train_cfg);
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / batches_used;
    rec.val_acc = val.acc;
    rec.val_f1 = val.f1;
    rec.val_auc = val.roc_auc_error.empty() ? val.roc_auc : 0.0;
    result.history.push_back(rec);

    if (stopper.offer(rec.val_auc)) {
      result.params = params.deep_copy();
      result.opt_state.cfg = opt.cfg;
      result.opt_state.step = opt.step;
      result.opt_state.m.clear();
      result.opt_state.v.clear();
      for (const Tensor& t : opt.m) result.opt_state.m.push_back(t.clone());
      for (const Tensor& t : opt.v) result.opt_state.v.push_back(t.clone());
      result.best_epoch = epoch;
      result.best_val_auc = rec.val_auc;
    }
    if (stopper.stop()) break;
  }
  if (result.best_epoch < 0)
    throw std::runtime_error("train: no epoch produced a usable validation score");
  return result;
}

}  // namespace msgt
