#include <benchmark/benchmark.h>

#include <filesystem>

#include "msgt/commands.hpp"
#include "msgt/rng.hpp"
#include "msgt/synth.hpp"
#include "msgt/training.hpp"

using namespace msgt;

namespace {

// One shared synthetic dataset for the pipeline benchmarks.
struct PipelineFixture {
  RunConfig cfg;
  RunData data;

  static PipelineFixture& instance() {
    static PipelineFixture f;
    return f;
  }

 private:
  PipelineFixture() : cfg(make_config()), data(load_run_data(cfg)) {}

  static RunConfig make_config() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "msgt_bench_data";
    SynthSpec spec;
    spec.core_genes = 200;
    spec.communities = 10;
    spec.omics_views = 2;
    spec.noncore_per_view = 500;
    spec.feature_dim = 4;
    spec.feature_noise = 2.5;
    spec.seed = 42;
    generate_synth_dataset(spec, dir.string());
    RunConfig cfg;
    cfg.sl_edges = (dir / "sl_edges.txt").string();
    cfg.omics_edges = {(dir / "omics_1.txt").string(), (dir / "omics_2.txt").string()};
    cfg.features = (dir / "features.csv").string();
    cfg.mvgnn_dims = {128, 64};
    cfg.lr = 1e-3;
    cfg.seed = 1;
    return cfg;
  }
};

}  // namespace

static void BM_SampleBatch(benchmark::State& state) {
  auto& f = PipelineFixture::instance();
  const TrainConfig tcfg = to_train_config(f.cfg);
  std::vector<int> core;
  for (int local = 0; local < f.data.mv.sl_view().node_count() && local < 100; ++local)
    core.push_back(f.data.mv.to_global(0, local));
  std::uint64_t tag = 0;
  for (auto _ : state) {
    SampledBatch b = sample_batch(core, f.data.mv, tcfg.sampler, tag++);
    benchmark::DoNotOptimize(b.union_ids.data());
  }
}
BENCHMARK(BM_SampleBatch);

static void BM_NormalizedAdjacency(benchmark::State& state) {
  auto& f = PipelineFixture::instance();
  for (auto _ : state) {
    SparseMatrix a = normalized_adjacency_sparse(f.data.mv.view(1));
    benchmark::DoNotOptimize(a.vals.data());
  }
}
BENCHMARK(BM_NormalizedAdjacency);

static void BM_ForwardBatch(benchmark::State& state) {
  auto& f = PipelineFixture::instance();
  const TrainConfig tcfg = to_train_config(f.cfg);
  const ModelConfig mcfg = to_model_config(f.cfg, f.data.mv.view_count(), f.data.features.dim());
  ModelParams params = init_model(mcfg, 7);
  const auto adj = view_adjacencies(f.data.mv);
  std::vector<int> core;
  for (int local = 0; local < f.data.mv.sl_view().node_count() && local < 100; ++local)
    core.push_back(f.data.mv.to_global(0, local));
  const SampledBatch batch = sample_batch(core, f.data.mv, tcfg.sampler, 0);
  for (auto _ : state) {
    BatchForward fwd = run_pipeline(f.data.mv, adj, f.data.features.matrix(), params, batch);
    benchmark::DoNotOptimize(fwd.core_features.values().data());
  }
}
BENCHMARK(BM_ForwardBatch);

static void BM_TrainStep(benchmark::State& state) {
  auto& f = PipelineFixture::instance();
  const TrainConfig tcfg = to_train_config(f.cfg);
  const ModelConfig mcfg = to_model_config(f.cfg, f.data.mv.view_count(), f.data.features.dim());
  ModelParams params = init_model(mcfg, 7);
  OptimizerState opt = init_optimizer(params, tcfg.adam);
  const auto adj = view_adjacencies(f.data.mv);
  std::vector<int> core;
  for (int local = 0; local < f.data.mv.sl_view().node_count() && local < 100; ++local)
    core.push_back(f.data.mv.to_global(0, local));
  const SampledBatch batch = sample_batch(core, f.data.mv, tcfg.sampler, 0);
  const std::set<GenePair> positives = f.data.dataset.positive_set(kTrain);

  for (auto _ : state) {
    Tape tape;
    watch_all(tape, params);
    BatchForward fwd = run_pipeline(f.data.mv, adj, f.data.features.matrix(), params, batch);
    std::vector<std::pair<int, int>> rows;
    std::vector<int> labels;
    for (std::size_t a = 0; a < fwd.core_global_ids.size(); ++a)
      for (std::size_t b = 0; b < fwd.core_global_ids.size(); ++b) {
        if (a == b) continue;
        const GenePair key = make_pair_sorted(
            f.data.mv.to_local(0, fwd.core_global_ids[a]),
            f.data.mv.to_local(0, fwd.core_global_ids[b]));
        rows.push_back({static_cast<int>(a), static_cast<int>(b)});
        labels.push_back(positives.count(key) ? 1 : 0);
      }
    Tensor loss = batch_loss(
        edge_logits(pair_features(fwd.core_features, rows, mcfg.pair_interaction),
                    params.clf),
        labels);
    tape.backward(loss);
    std::vector<Tensor> grads;
    for (auto& [name, t] : params.named_tensors()) grads.push_back(tape.grad(*t));
    adam_step(params, grads, opt);
    benchmark::DoNotOptimize(loss.scalar());
  }
}
BENCHMARK(BM_TrainStep);
