#pragma once

#include <iosfwd>
#include <string>

#include "msgt/config.hpp"
#include "msgt/synth.hpp"

namespace msgt {

// Exit codes shared by the CLI: 0 success, 2 unreadable input file,
// 1 anything else.
constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitMissingFile = 2;

// Loaded data bundle for one run.
struct RunData {
  MultiViewGraph mv;
  FeatureTable features;
  EdgeDataset dataset;
};

// Loads views and features per config, applies the z-score (statistics over
// the training genes only) and builds the split.
RunData load_run_data(const RunConfig& cfg);

// Trains, then writes model.ckpt, history.csv and metrics.json into
// cfg.out_dir. Returns a process exit code and never throws.
int cmd_train(const RunConfig& cfg, std::ostream& log);

// Scores gene pairs from a whitespace-separated pairs file against a trained
// checkpoint; writes `gene_a,gene_b,prob_sl,label` rows to out_csv. Unknown
// or self pairs produce error rows and a warning, not a failure.
int cmd_eval(const std::string& checkpoint_path, const std::string& pairs_path,
             const std::string& out_csv, std::ostream& log);

int cmd_synth(const SynthSpec& spec, const std::string& dir, std::ostream& log);

// Emits `batches` sampled batches (one line of global gene ids each).
int cmd_sample_debug(const RunConfig& cfg, int batches, std::ostream& out,
                     std::ostream& log);

}  // namespace msgt
