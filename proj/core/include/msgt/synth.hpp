#pragma once

#include <cstdint>
#include <string>

namespace msgt {

// Planted-community benchmark generator. SL edges are drawn inside core-gene
// communities; omics views span core plus auxiliary genes with edge rates
// interpolating between pure background (correlation 0) and community-aligned
// (correlation 1). Features carry a noisy community centroid, so the planted
// structure is recoverable but not trivial.
struct SynthSpec {
  int core_genes = 200;
  int communities = 10;
  double sl_prob = 0.3;        // intra-community SL edge probability
  int omics_views = 2;
  double correlation = 1.0;    // 0 = omics independent of SL structure
  int noncore_per_view = 500;  // auxiliary genes shared by all omics views
  double feature_noise = 1.0;
  int feature_dim = 16;
  double omics_intra_prob = 0.15;
  double omics_background_prob = 0.01;
  std::uint64_t seed = 0;

  void validate() const;
};

// Writes sl_edges.txt, omics_<i>.txt, features.csv and manifest.json into
// `dir` (created if needed). Identical specs produce identical bytes.
void generate_synth_dataset(const SynthSpec& spec, const std::string& dir);

}  // namespace msgt
