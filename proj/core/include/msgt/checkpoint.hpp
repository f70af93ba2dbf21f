#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "msgt/model.hpp"
#include "msgt/training.hpp"

namespace msgt {

// Versioned binary container: magic "MSGT", u32 format version, then
// length-prefixed fields (config snapshot JSON, rng state, step counter) and
// length-prefixed named tensors (name, rows u64, cols u64, row-major
// little-endian f64). Round-trips are bit-exact.
struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;
  std::string config_json;
  std::string rng_state;
  std::uint64_t step = 0;
  std::vector<std::pair<std::string, Tensor>> tensors;

  const Tensor* find(const std::string& name) const;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

// Model + optimizer state under the names used by ModelParams plus
// "adam.m.<name>" / "adam.v.<name>".
Checkpoint make_checkpoint(const std::string& config_json, const ModelParams& params,
                           const OptimizerState& opt);

// Rebuilds parameters from a checkpoint created for the same model config.
// Any missing or shape-mismatched tensor is an error naming the offender.
void restore_model(const Checkpoint& ckpt, ModelParams& params, OptimizerState* opt);

}  // namespace msgt
