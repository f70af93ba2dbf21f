#include "msgt/sampler.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace msgt {

std::vector<double> transition_probs(const GeneGraph& g, int j) {
  const auto& nb = g.adjacency(j);  // range-checks j
  std::vector<double> row(g.node_count(), 0.0);
  if (nb.empty()) return row;
  const double p = 1.0 / static_cast<double>(nb.size());
  for (int k : nb) row[k] = p;
  return row;
}

std::vector<int> random_walk(const GeneGraph& g, int start, int len, Rng& rng) {
  std::vector<int> visited;
  visited.reserve(len + 1);
  visited.push_back(start);
  int cur = start;
  for (int step = 0; step < len; ++step) {
    const auto& nb = g.adjacency(cur);
    if (nb.empty()) break;  // dead end, no restart mass in the chain
    cur = nb[rng.below(nb.size())];
    visited.push_back(cur);
  }
  return visited;
}

SampledBatch sample_cross_omics(const std::vector<int>& core_batch,
                                const MultiViewGraph& mv, const SamplerConfig& cfg) {
  SampledBatch out;
  out.core_ids = core_batch;
  std::set<int> core_set(core_batch.begin(), core_batch.end());
  for (int g : core_batch)
    if (!mv.in_view(0, g))
      throw std::invalid_argument("sample_cross_omics: gene " +
                                  mv.global_vocab().name_of(g) + " is not in the SL view");

  std::set<int> visited_noncore;
  out.per_view_hits.assign(std::max(0, mv.view_count() - 1), 0);
  for (int view = 1; view < mv.view_count(); ++view) {
    const GeneGraph& g = mv.view(view);
    std::set<int> view_hits;
    for (int core : core_batch) {
      const int local = mv.to_local(view, core);
      if (local < 0) continue;  // core gene absent from this omics view
      for (int w = 0; w < cfg.walks_per_gene; ++w) {
        Rng rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(view),
                                       static_cast<std::uint64_t>(core),
                                       static_cast<std::uint64_t>(w)}));
        for (int local_node : random_walk(g, local, cfg.walk_len, rng)) {
          const int global = mv.to_global(view, local_node);
          view_hits.insert(global);
          if (!core_set.count(global)) visited_noncore.insert(global);
        }
      }
    }
    out.per_view_hits[view - 1] = view_hits.size();
  }

  out.union_ids = core_batch;
  out.union_ids.insert(out.union_ids.end(), visited_noncore.begin(), visited_noncore.end());
  return out;
}

SampledBatch cap_resample(SampledBatch batch, const SamplerConfig& cfg, Rng& rng) {
  const int total = static_cast<int>(batch.union_ids.size());
  if (total <= cfg.cap) return batch;

  const int n_core = static_cast<int>(batch.core_ids.size());
  const int keep = cfg.cap - n_core;
  if (keep < 0)
    throw std::logic_error("cap_resample: core batch exceeds the cap");

  std::set<int> core_set(batch.core_ids.begin(), batch.core_ids.end());
  std::vector<int> noncore;
  noncore.reserve(total - n_core);
  for (int id : batch.union_ids)
    if (!core_set.count(id)) noncore.push_back(id);
  std::sort(noncore.begin(), noncore.end());

  std::vector<int> kept;
  kept.reserve(keep);
  for (int idx : rng.sample_without_replacement(static_cast<int>(noncore.size()), keep))
    kept.push_back(noncore[idx]);
  std::sort(kept.begin(), kept.end());

  batch.union_ids = batch.core_ids;
  batch.union_ids.insert(batch.union_ids.end(), kept.begin(), kept.end());
  return batch;
}

SampledBatch sample_batch(const std::vector<int>& core_batch, const MultiViewGraph& mv,
                          const SamplerConfig& cfg, std::uint64_t batch_tag) {
  SamplerConfig local = cfg;
  local.seed = derive_seed(cfg.seed, {0x5a3c61ULL, batch_tag});
  SampledBatch batch = sample_cross_omics(core_batch, mv, local);
  Rng cap_rng(derive_seed(local.seed, {0xca9ULL}));
  return cap_resample(std::move(batch), cfg, cap_rng);
}

SampledBatch sample_batch_uniform(const std::vector<int>& core_batch,
                                  const MultiViewGraph& mv, const SamplerConfig& cfg,
                                  std::uint64_t batch_tag) {
  SampledBatch walked = sample_batch(core_batch, mv, cfg, batch_tag);
  const int n_noncore = static_cast<int>(walked.union_ids.size() - walked.core_ids.size());

  std::set<int> core_set(core_batch.begin(), core_batch.end());
  std::vector<int> pool;
  for (int g = 0; g < mv.global_size(); ++g) {
    if (core_set.count(g)) continue;
    for (int view = 1; view < mv.view_count(); ++view) {
      if (mv.in_view(view, g)) {
        pool.push_back(g);
        break;
      }
    }
  }
  const int take = std::min<int>(n_noncore, static_cast<int>(pool.size()));

  Rng rng(derive_seed(cfg.seed, {0x0b5ULL, batch_tag}));
  std::vector<int> kept;
  kept.reserve(take);
  for (int idx : rng.sample_without_replacement(static_cast<int>(pool.size()), take))
    kept.push_back(pool[idx]);
  std::sort(kept.begin(), kept.end());

  SampledBatch out;
  out.core_ids = core_batch;
  out.per_view_hits = walked.per_view_hits;
  out.union_ids = core_batch;
  out.union_ids.insert(out.union_ids.end(), kept.begin(), kept.end());
  return out;
}

}  // namespace msgt
