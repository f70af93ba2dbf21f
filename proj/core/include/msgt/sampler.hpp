#pragma once

#include <cstdint>
#include <vector>

#include "msgt/graph.hpp"
#include "msgt/rng.hpp"

namespace msgt {

struct SamplerConfig {
  int batch_core = 100;     // core genes per batch
  int walk_len = 10;        // steps per walk
  int cap = 500;            // hard ceiling on |union_ids|
  int walks_per_gene = 1;   // walks started per (core gene, view)
  std::uint64_t seed = 0;
};

// One sampled batch: the core genes the batch was seeded with, the capped
// union S of walk-visited genes (all in global ids), and per-view visit
// tallies for diagnostics. union_ids is laid out core first, then non-core
// ascending, so batches are reproducible byte for byte.
struct SampledBatch {
  std::vector<int> core_ids;
  std::vector<int> union_ids;
  std::vector<std::size_t> per_view_hits;  // one entry per omics view
};

// Uniform transition row of the walk chain: 1/deg(j) on neighbors, zero
// elsewhere. A zero-degree node yields an all-zero row.
std::vector<double> transition_probs(const GeneGraph& g, int j);

// Walk of at most `len` steps starting at `start` (view-local ids). Truncates
// early when it reaches a zero-degree node. Returns the visited sequence,
// start included.
std::vector<int> random_walk(const GeneGraph& g, int start, int len, Rng& rng);

// Walks every omics view from the core genes it contains and unions the
// visits. Per-(view, gene, walk) rng streams are derived by hashing, so the
// result is independent of any parallel schedule. No cap applied here.
SampledBatch sample_cross_omics(const std::vector<int>& core_batch,
                                const MultiViewGraph& mv, const SamplerConfig& cfg);

// Enforces |union_ids| <= cap: keeps every core gene, downsamples non-core
// genes uniformly without replacement. Batches already under the cap pass
// through unchanged.
SampledBatch cap_resample(SampledBatch batch, const SamplerConfig& cfg, Rng& rng);

// sample_cross_omics followed by cap_resample with a batch-specific stream.
SampledBatch sample_batch(const std::vector<int>& core_batch, const MultiViewGraph& mv,
                          const SamplerConfig& cfg, std::uint64_t batch_tag);

// Ablation variant: same core genes and same non-core count as the walk-based
// batch, but non-core genes drawn uniformly from all omics genes instead.
SampledBatch sample_batch_uniform(const std::vector<int>& core_batch,
                                  const MultiViewGraph& mv, const SamplerConfig& cfg,
                                  std::uint64_t batch_tag);

}  // namespace msgt
