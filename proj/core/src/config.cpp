#include "msgt/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace msgt {

using nlohmann::json;

void RunConfig::validate() const {
  if (mvgnn_layers < 1) throw std::invalid_argument("config: mvgnn.layers must be >= 1");
  if (static_cast<int>(mvgnn_dims.size()) != mvgnn_layers)
    throw std::invalid_argument("config: mvgnn.dims must list one width per layer");
  for (int d : mvgnn_dims)
    if (d <= 0) throw std::invalid_argument("config: mvgnn.dims entries must be positive");
  activation_from_string(mvgnn_activation);
  if (batch_core < 2)
    throw std::invalid_argument("config: sampler.batch_core must be >= 2 (pairs need "
                                "two core genes)");
  if (walk_len < 0) throw std::invalid_argument("config: sampler.walk_len must be >= 0");
  if (cap < batch_core)
    throw std::invalid_argument("config: sampler.cap must be >= sampler.batch_core");
  if (walks_per_gene < 1)
    throw std::invalid_argument("config: sampler.walks_per_gene must be >= 1");
  if (gt_heads < 1) throw std::invalid_argument("config: gt.heads must be >= 1");
  if (gt_dim < 1 || gt_dim % gt_heads != 0)
    throw std::invalid_argument("config: gt.dim must be a positive multiple of gt.heads");
  if (lr <= 0.0) throw std::invalid_argument("config: train.lr must be positive");
  if (patience < 0) throw std::invalid_argument("config: train.patience must be >= 0");
  if (max_epochs < 1) throw std::invalid_argument("config: train.max_epochs must be >= 1");
  if (loss_neg_ratio < 0.0)
    throw std::invalid_argument("config: loss.neg_ratio must be >= 0");
  if (eval_neg_ratio <= 0.0)
    throw std::invalid_argument("config: eval.neg_ratio must be positive");
  split_mode_from_string(split_mode);
  static const std::set<std::string> known_ablations = {"", "mvgnn", "sampling", "gt",
                                                        "omics"};
  if (!known_ablations.count(ablate_without))
    throw std::invalid_argument("config: ablate.without must be one of mvgnn, sampling, "
                                "gt, omics (got '" + ablate_without + "')");
}

AblationFlags RunConfig::ablation_flags() const {
  AblationFlags f;
  if (ablate_without == "mvgnn") f.use_mvgnn = false;
  else if (ablate_without == "sampling") f.use_sampling = false;
  else if (ablate_without == "gt") f.use_gt = false;
  else if (ablate_without == "omics") f.use_omics = false;
  return f;
}

namespace {

json to_json_object(const RunConfig& c) {
  json j;
  j["data"]["sl_edges"] = c.sl_edges;
  j["data"]["omics_edges"] = c.omics_edges;
  j["data"]["features"] = c.features;
  j["data"]["out_dir"] = c.out_dir;
  j["mvgnn"]["layers"] = c.mvgnn_layers;
  j["mvgnn"]["dims"] = c.mvgnn_dims;
  j["mvgnn"]["activation"] = c.mvgnn_activation;
  j["mvgnn"]["bias"] = c.mvgnn_bias;
  j["sampler"]["batch_core"] = c.batch_core;
  j["sampler"]["walk_len"] = c.walk_len;
  j["sampler"]["cap"] = c.cap;
  j["sampler"]["walks_per_gene"] = c.walks_per_gene;
  j["gt"]["dim"] = c.gt_dim;
  j["gt"]["heads"] = c.gt_heads;
  j["gt"]["dump_attention_csv"] = c.dump_attention_csv;
  j["predictor"]["pair_interaction"] = c.pair_interaction;
  j["train"]["lr"] = c.lr;
  j["train"]["patience"] = c.patience;
  j["train"]["max_epochs"] = c.max_epochs;
  j["loss"]["neg_ratio"] = c.loss_neg_ratio;
  j["eval"]["neg_ratio"] = c.eval_neg_ratio;
  j["split"]["mode"] = c.split_mode;
  j["split"]["seed"] = c.split_seed;
  j["ablate"]["without"] = c.ablate_without;
  j["seed"] = c.seed;
  return j;
}

void reject_unknown_keys(const json& given, const json& known, const std::string& prefix) {
  for (auto it = given.begin(); it != given.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!known.contains(it.key()))
      throw std::invalid_argument("config: unknown key '" + path + "'");
    if (it->is_object()) reject_unknown_keys(*it, known.at(it.key()), path);
  }
}

template <class T>
void maybe(const json& j, const char* section, const char* key, T& out) {
  if (j.contains(section) && j.at(section).contains(key))
    j.at(section).at(key).get_to(out);
}

}  // namespace

std::string RunConfig::to_json() const { return to_json_object(*this).dump(2); }

RunConfig config_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: not valid JSON: ") + e.what());
  }
  RunConfig c;
  reject_unknown_keys(j, to_json_object(c), "");

  maybe(j, "data", "sl_edges", c.sl_edges);
  maybe(j, "data", "omics_edges", c.omics_edges);
  maybe(j, "data", "features", c.features);
  maybe(j, "data", "out_dir", c.out_dir);
  maybe(j, "mvgnn", "layers", c.mvgnn_layers);
  maybe(j, "mvgnn", "dims", c.mvgnn_dims);
  maybe(j, "mvgnn", "activation", c.mvgnn_activation);
  maybe(j, "mvgnn", "bias", c.mvgnn_bias);
  maybe(j, "sampler", "batch_core", c.batch_core);
  maybe(j, "sampler", "walk_len", c.walk_len);
  maybe(j, "sampler", "cap", c.cap);
  maybe(j, "sampler", "walks_per_gene", c.walks_per_gene);
  maybe(j, "gt", "dim", c.gt_dim);
  maybe(j, "gt", "heads", c.gt_heads);
  maybe(j, "gt", "dump_attention_csv", c.dump_attention_csv);
  maybe(j, "predictor", "pair_interaction", c.pair_interaction);
  maybe(j, "train", "lr", c.lr);
  maybe(j, "train", "patience", c.patience);
  maybe(j, "train", "max_epochs", c.max_epochs);
  maybe(j, "loss", "neg_ratio", c.loss_neg_ratio);
  maybe(j, "eval", "neg_ratio", c.eval_neg_ratio);
  maybe(j, "split", "mode", c.split_mode);
  maybe(j, "split", "seed", c.split_seed);
  maybe(j, "ablate", "without", c.ablate_without);
  if (j.contains("seed")) j.at("seed").get_to(c.seed);
  c.validate();
  return c;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

void apply_env_overrides(RunConfig& cfg) {
  if (const char* env = std::getenv("MSGT_SEED")) {
    try {
      cfg.seed = std::stoull(env);
    } catch (const std::exception&) {
      throw std::invalid_argument("MSGT_SEED is not an unsigned integer: " +
                                  std::string(env));
    }
  }
}

ModelConfig to_model_config(const RunConfig& cfg, int views, int feature_dim) {
  ModelConfig m;
  m.views = views;
  m.feature_dim = feature_dim;
  m.mvgnn_dims = cfg.mvgnn_dims;
  m.activation = activation_from_string(cfg.mvgnn_activation);
  m.mvgnn_bias = cfg.mvgnn_bias;
  m.gt_dim = cfg.gt_dim;
  m.gt_heads = cfg.gt_heads;
  m.pair_interaction = cfg.pair_interaction;
  m.ablate = cfg.ablation_flags();
  return m;
}

TrainConfig to_train_config(const RunConfig& cfg) {
  TrainConfig t;
  t.sampler.batch_core = cfg.batch_core;
  t.sampler.walk_len = cfg.walk_len;
  t.sampler.cap = cfg.cap;
  t.sampler.walks_per_gene = cfg.walks_per_gene;
  t.sampler.seed = cfg.seed;
  t.adam.lr = cfg.lr;
  t.max_epochs = cfg.max_epochs;
  t.patience = cfg.patience;
  t.loss_neg_ratio = cfg.loss_neg_ratio;
  t.seed = cfg.seed;
  return t;
}

SplitSpec to_split_spec(const RunConfig& cfg) {
  SplitSpec s;
  s.mode = split_mode_from_string(cfg.split_mode);
  s.seed = cfg.split_seed;
  s.neg_ratio = cfg.eval_neg_ratio;
  return s;
}

}  // namespace msgt
