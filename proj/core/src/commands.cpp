#include "msgt/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "json.hpp"
#include "msgt/checkpoint.hpp"
#include "msgt/rng.hpp"

namespace msgt {

namespace {

bool is_missing_file_error(const std::string& message) {
  return message.find("cannot open") != std::string::npos;
}

std::vector<GeneGraph> load_omics_views(const RunConfig& cfg) {
  std::vector<GeneGraph> omics;
  if (cfg.ablation_flags().use_omics) {
    for (const std::string& path : cfg.omics_edges)
      omics.push_back(load_view_file(path));
  }
  return omics;
}

std::vector<int> training_stat_genes(const MultiViewGraph& mv, const EdgeDataset& ds) {
  std::vector<int> genes;
  for (int local = 0; local < mv.sl_view().node_count(); ++local) {
    if (ds.mode == SplitMode::kGeneOut && ds.gene_split[local] != kTrain) continue;
    genes.push_back(mv.to_global(0, local));
  }
  return genes;
}

void write_history_csv(const std::string& path, const std::vector<EpochRecord>& history) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open history file for writing: " + path);
  out << "epoch,train_loss,val_acc,val_f1,val_auc\n";
  out << std::setprecision(17);
  for (const EpochRecord& r : history)
    out << r.epoch << "," << r.train_loss << "," << r.val_acc << "," << r.val_f1 << ","
        << r.val_auc << "\n";
}

void write_metrics_json(const std::string& path, const RunConfig& cfg,
                        const MetricsReport& test) {
  nlohmann::json j;
  j["split"] = "test";
  j["mode"] = cfg.split_mode;
  j["acc"] = test.acc;
  j["f1"] = test.f1;
  if (test.roc_auc_error.empty()) j["roc_auc"] = test.roc_auc;
  else j["roc_auc_error"] = test.roc_auc_error;
  j["seed"] = cfg.seed;
  j["ablation"] = cfg.ablate_without;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open metrics file for writing: " + path);
  out << j.dump(2) << "\n";
}

// First-batch attention inspection dump (debug aid, initial parameters).
void dump_first_batch_attention(const RunConfig& cfg, const RunData& data,
                                const std::string& path) {
  const TrainConfig tcfg = to_train_config(cfg);
  ModelConfig mcfg = to_model_config(cfg, data.mv.view_count(), data.features.dim());
  if (!mcfg.ablate.use_gt) return;
  ModelParams params = init_model(mcfg, derive_seed(tcfg.seed, {0x1717ULL}));

  std::vector<int> pool = training_stat_genes(data.mv, data.dataset);
  Rng rng(derive_seed(tcfg.seed, {0xe90cULL, 0}));
  rng.shuffle(pool);
  pool.resize(std::min<std::size_t>(pool.size(), tcfg.sampler.batch_core));

  const SampledBatch batch = sample_batch(pool, data.mv, tcfg.sampler, 0);
  std::vector<SparseMatrix> adj = view_adjacencies(data.mv);
  adj[0] = normalized_adjacency_sparse(
      masked_sl_graph(data.mv.sl_view(), data.dataset.positives[kTrain]));

  ViewFeatures vf = mcfg.ablate.use_mvgnn
                        ? mvgnn_forward(data.mv, adj, data.features.matrix(), params.mvgnn)
                        : ViewFeatures{};
  if (!mcfg.ablate.use_mvgnn)
    for (int i = 0; i < data.mv.view_count(); ++i)
      vf.per_view.push_back(gather_rows(data.features.matrix(), data.mv.local_to_global(i)));

  AssembledBatch ab = assemble_features(vf, batch, data.mv);
  Tensor w = attention_weights(qkv(ab, params.gt)[0]);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open attention dump for writing: " + path);
  out << std::setprecision(17);
  for (int i = 0; i < w.rows(); ++i) {
    for (int j = 0; j < w.cols(); ++j) out << (j ? "," : "") << w.at(i, j);
    out << "\n";
  }
}

}  // namespace

RunData load_run_data(const RunConfig& cfg) {
  GeneGraph sl = load_view_file(cfg.sl_edges);
  MultiViewGraph mv = build_multiview(std::move(sl), load_omics_views(cfg));
  FeatureTable features = load_features_file(cfg.features, mv.global_vocab());

  const SplitSpec spec = to_split_spec(cfg);
  EdgeDataset dataset = spec.mode == SplitMode::kPairOut
                            ? split_pairs(mv.sl_view(), spec)
                            : split_genes(mv.sl_view(), spec);
  FeatureTable normalized = features;
  normalized.zscore(training_stat_genes(mv, dataset));
  return RunData{std::move(mv), std::move(normalized), std::move(dataset)};
}

int cmd_train(const RunConfig& cfg, std::ostream& log) {
  try {
    cfg.validate();
    check_supported(cfg.ablation_flags(), split_mode_from_string(cfg.split_mode));
    RunData data = load_run_data(cfg);

    if (!cfg.dump_attention_csv.empty())
      dump_first_batch_attention(cfg, data, cfg.dump_attention_csv);

    const ModelConfig mcfg =
        to_model_config(cfg, data.mv.view_count(), data.features.dim());
    const TrainConfig tcfg = to_train_config(cfg);
    TrainResult result = train(data.mv, data.features, data.dataset, mcfg, tcfg);

    const MetricsReport test =
        evaluate_split(result.params, data.mv, data.features, data.dataset, kTest, tcfg);

    std::filesystem::create_directories(cfg.out_dir);
    save_checkpoint(cfg.out_dir + "/model.ckpt",
                    make_checkpoint(cfg.to_json(), result.params, result.opt_state));
    write_history_csv(cfg.out_dir + "/history.csv", result.history);
    write_metrics_json(cfg.out_dir + "/metrics.json", cfg, test);

    log << "best epoch " << result.best_epoch << " (val roc_auc "
        << result.best_val_auc << "); test acc " << test.acc << " f1 " << test.f1
        << " roc_auc "
        << (test.roc_auc_error.empty() ? std::to_string(test.roc_auc)
                                       : test.roc_auc_error)
        << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return is_missing_file_error(e.what()) ? kExitMissingFile : kExitError;
  }
}

int cmd_eval(const std::string& checkpoint_path, const std::string& pairs_path,
             const std::string& out_csv, std::ostream& log) {
  try {
    const Checkpoint ckpt = load_checkpoint(checkpoint_path);
    RunConfig cfg = config_from_json(ckpt.config_json);

    GeneGraph sl = load_view_file(cfg.sl_edges);
    MultiViewGraph mv = build_multiview(std::move(sl), load_omics_views(cfg));
    FeatureTable features = load_features_file(cfg.features, mv.global_vocab());
    // deployment-time statistics: every SL-view gene is known
    std::vector<int> all_sl;
    for (int local = 0; local < mv.sl_view().node_count(); ++local)
      all_sl.push_back(mv.to_global(0, local));
    features.zscore(all_sl);

    ModelParams params = init_model(
        to_model_config(cfg, mv.view_count(), features.dim()),
        derive_seed(cfg.seed, {0x1717ULL}));
    restore_model(ckpt, params, nullptr);

    std::ifstream pairs_in(pairs_path);
    if (!pairs_in) throw std::runtime_error("cannot open pairs file: " + pairs_path);

    struct Row {
      std::string a, b;
      int label = -1;
      bool ok = false;
      std::string error;
      std::size_t pair_index = 0;  // into `pairs` when ok
    };
    std::vector<Row> rows;
    std::vector<GenePair> pairs;
    std::string line;
    std::size_t line_no = 0;
    std::size_t warnings = 0;
    while (std::getline(pairs_in, line)) {
      ++line_no;
      const std::size_t start = line.find_first_not_of(" \t\r");
      if (start == std::string::npos || line[start] == '#') continue;
      std::istringstream ls(line);
      Row row;
      std::string label_field;
      if (!(ls >> row.a >> row.b)) {
        throw std::runtime_error(pairs_path + ":" + std::to_string(line_no) +
                                 ": expected two gene symbols");
      }
      if (ls >> label_field) row.label = std::stoi(label_field);
      const auto ga = mv.sl_view().vocab().find(row.a);
      const auto gb = mv.sl_view().vocab().find(row.b);
      if (!ga.has_value() || !gb.has_value()) {
        row.error = "unknown_gene";
      } else if (*ga == *gb) {
        row.error = "self_pair";
      } else {
        row.ok = true;
        row.pair_index = pairs.size();
        pairs.push_back({*ga, *gb});
      }
      if (!row.ok) {
        ++warnings;
        log << "warning: " << pairs_path << ":" << line_no << ": " << row.error << " ("
            << row.a << ", " << row.b << ")\n";
      }
      rows.push_back(row);
    }

    const TrainConfig tcfg = to_train_config(cfg);
    const std::vector<double> scores =
        score_pairs(params, mv, view_adjacencies(mv), features, pairs, tcfg);

    std::ofstream out(out_csv, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output CSV for writing: " + out_csv);
    out << "gene_a,gene_b,prob_sl,label\n";
    out << std::setprecision(17);
    for (const Row& row : rows) {
      out << row.a << "," << row.b << ",";
      if (row.ok) out << scores[row.pair_index];
      else out << "error:" << row.error;
      out << "," << row.label << "\n";
    }
    if (warnings > 0) log << warnings << " pair(s) could not be scored\n";
    return kExitOk;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return is_missing_file_error(e.what()) ? kExitMissingFile : kExitError;
  }
}

int cmd_synth(const SynthSpec& spec, const std::string& dir, std::ostream& log) {
  try {
    generate_synth_dataset(spec, dir);
    log << "wrote synthetic dataset to " << dir << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitError;
  }
}

int cmd_sample_debug(const RunConfig& cfg, int batches, std::ostream& out,
                     std::ostream& log) {
  try {
    cfg.validate();
    RunData data = load_run_data(cfg);
    const TrainConfig tcfg = to_train_config(cfg);
    std::vector<int> pool = training_stat_genes(data.mv, data.dataset);

    Rng rng(derive_seed(tcfg.seed, {0xe90cULL, 0}));
    rng.shuffle(pool);
    std::size_t cursor = 0;
    for (int b = 0; b < batches; ++b) {
      if (cursor + 2 > pool.size()) {
        rng.shuffle(pool);
        cursor = 0;
      }
      const std::size_t stop = std::min(pool.size(), cursor + tcfg.sampler.batch_core);
      std::vector<int> core(pool.begin() + cursor, pool.begin() + stop);
      cursor = stop;
      const SampledBatch batch =
          sample_batch(core, data.mv, tcfg.sampler, static_cast<std::uint64_t>(b));
      for (std::size_t i = 0; i < batch.union_ids.size(); ++i)
        out << (i ? " " : "") << batch.union_ids[i];
      out << "\n";
    }
    return kExitOk;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return is_missing_file_error(e.what()) ? kExitMissingFile : kExitError;
  }
}

}  // namespace msgt
