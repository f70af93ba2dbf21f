#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "msgt/commands.hpp"

namespace {

struct TrainCli {
  std::string config_path;
  std::string sl_edges, features, out_dir, split_mode, without, dump_attention;
  std::vector<std::string> omics;
  std::uint64_t seed = 0, split_seed = 0;
  int max_epochs = 0, patience = -1, batch_core = 0;
  double lr = 0.0;
};

void add_train_options(CLI::App* cmd, TrainCli& opts) {
  cmd->add_option("--config", opts.config_path, "JSON config file");
  cmd->add_option("--sl", opts.sl_edges, "SL-view edge list");
  cmd->add_option("--omics", opts.omics, "omics edge list (repeatable)");
  cmd->add_option("--features", opts.features, "gene feature CSV");
  cmd->add_option("--out-dir", opts.out_dir, "output directory");
  cmd->add_option("--seed", opts.seed, "global seed");
  cmd->add_option("--split-mode", opts.split_mode, "pair_out or gene_out");
  cmd->add_option("--split-seed", opts.split_seed, "split shuffling seed");
  cmd->add_option("--max-epochs", opts.max_epochs, "epoch cap");
  cmd->add_option("--patience", opts.patience, "early-stopping patience");
  cmd->add_option("--batch-core", opts.batch_core, "core genes per batch");
  cmd->add_option("--lr", opts.lr, "Adam learning rate");
  cmd->add_option("--dump-attention", opts.dump_attention,
                  "CSV path for the first batch's attention weights");
}

msgt::RunConfig resolve_config(const CLI::App& cmd, const TrainCli& opts) {
  msgt::RunConfig cfg;
  if (!opts.config_path.empty()) cfg = msgt::load_config_file(opts.config_path);
  if (cmd.count("--sl")) cfg.sl_edges = opts.sl_edges;
  if (cmd.count("--omics")) cfg.omics_edges = opts.omics;
  if (cmd.count("--features")) cfg.features = opts.features;
  if (cmd.count("--out-dir")) cfg.out_dir = opts.out_dir;
  if (cmd.count("--seed")) cfg.seed = opts.seed;
  if (cmd.count("--split-mode")) cfg.split_mode = opts.split_mode;
  if (cmd.count("--split-seed")) cfg.split_seed = opts.split_seed;
  if (cmd.count("--max-epochs")) cfg.max_epochs = opts.max_epochs;
  if (cmd.count("--patience")) cfg.patience = opts.patience;
  if (cmd.count("--batch-core")) cfg.batch_core = opts.batch_core;
  if (cmd.count("--lr")) cfg.lr = opts.lr;
  if (cmd.count("--dump-attention")) cfg.dump_attention_csv = opts.dump_attention;
  if (cmd.count("--without")) cfg.ablate_without = opts.without;
  msgt::apply_env_overrides(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MSGT: multi-omics sampling-based graph transformer for "
               "synthetic-lethality prediction"};
  app.require_subcommand(1);

  TrainCli train_opts;
  CLI::App* train_cmd =
      app.add_subcommand("train", "train a model and report test metrics");
  add_train_options(train_cmd, train_opts);
  train_cmd->add_option("--without", train_opts.without,
                        "ablation: mvgnn, sampling, gt or omics");

  TrainCli ablate_opts;
  CLI::App* ablate_cmd = app.add_subcommand("ablate", "train with one module disabled");
  add_train_options(ablate_cmd, ablate_opts);
  ablate_cmd
      ->add_option("--without", ablate_opts.without,
                   "module to disable: mvgnn, sampling, gt or omics")
      ->required();

  std::string eval_ckpt, eval_pairs, eval_out = "predictions.csv";
  CLI::App* eval_cmd = app.add_subcommand("eval", "score gene pairs with a checkpoint");
  eval_cmd->add_option("--checkpoint", eval_ckpt, "trained model checkpoint")->required();
  eval_cmd->add_option("--pairs", eval_pairs, "pairs file (two symbols per line)")
      ->required();
  eval_cmd->add_option("--out", eval_out, "output CSV path");

  msgt::SynthSpec synth_spec;
  std::string synth_dir = "synth_data";
  CLI::App* synth_cmd =
      app.add_subcommand("synth", "generate a planted benchmark dataset");
  synth_cmd->add_option("--out", synth_dir, "output directory");
  synth_cmd->add_option("--core-genes", synth_spec.core_genes, "number of core genes");
  synth_cmd->add_option("--communities", synth_spec.communities, "number of communities");
  synth_cmd->add_option("--sl-prob", synth_spec.sl_prob, "intra-community SL probability");
  synth_cmd->add_option("--omics-views", synth_spec.omics_views, "number of omics views");
  synth_cmd->add_option("--correlation", synth_spec.correlation,
                        "omics/community correlation strength in [0,1]");
  synth_cmd->add_option("--noncore", synth_spec.noncore_per_view,
                        "auxiliary genes per omics view");
  synth_cmd->add_option("--noise", synth_spec.feature_noise, "feature noise level");
  synth_cmd->add_option("--feature-dim", synth_spec.feature_dim, "feature dimension");
  synth_cmd->add_option("--omics-intra", synth_spec.omics_intra_prob,
                        "omics intra-community edge probability");
  synth_cmd->add_option("--omics-background", synth_spec.omics_background_prob,
                        "omics background edge probability");
  synth_cmd->add_option("--seed", synth_spec.seed, "generator seed");

  TrainCli debug_opts;
  int debug_batches = 5;
  CLI::App* debug_cmd =
      app.add_subcommand("sample-debug", "print sampled batches as id lists");
  add_train_options(debug_cmd, debug_opts);
  debug_cmd->add_option("--batches", debug_batches, "number of batches to emit");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed())
      return msgt::cmd_train(resolve_config(*train_cmd, train_opts), std::cerr);
    if (ablate_cmd->parsed())
      return msgt::cmd_train(resolve_config(*ablate_cmd, ablate_opts), std::cerr);
    if (eval_cmd->parsed())
      return msgt::cmd_eval(eval_ckpt, eval_pairs, eval_out, std::cerr);
    if (synth_cmd->parsed()) return msgt::cmd_synth(synth_spec, synth_dir, std::cerr);
    if (debug_cmd->parsed())
      return msgt::cmd_sample_debug(resolve_config(*debug_cmd, debug_opts), debug_batches,
                                    std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return msgt::kExitError;
  }
  return msgt::kExitError;
}
