#include "msgt/synth.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "msgt/rng.hpp"

namespace msgt {

void SynthSpec::validate() const {
  if (core_genes < 2) throw std::invalid_argument("synth: core_genes must be >= 2");
  if (communities < 1 || communities > core_genes)
    throw std::invalid_argument("synth: communities must be in [1, core_genes]");
  for (double p : {sl_prob, correlation, omics_intra_prob, omics_background_prob})
    if (p < 0.0 || p > 1.0)
      throw std::invalid_argument("synth: probabilities must lie in [0, 1]");
  if (omics_views < 0) throw std::invalid_argument("synth: omics_views must be >= 0");
  if (noncore_per_view < 0)
    throw std::invalid_argument("synth: noncore_per_view must be >= 0");
  if (feature_dim < 1) throw std::invalid_argument("synth: feature_dim must be >= 1");
  if (feature_noise < 0.0) throw std::invalid_argument("synth: feature_noise must be >= 0");
}

namespace {

std::string gene_name(const char* prefix, int i) {
  std::ostringstream os;
  os << prefix << std::setw(4) << std::setfill('0') << i;
  return os.str();
}

}  // namespace

void generate_synth_dataset(const SynthSpec& spec, const std::string& dir) {
  spec.validate();
  std::filesystem::create_directories(dir);

  const int n_core = spec.core_genes;
  const int n_aux = spec.noncore_per_view;
  const int n_total = n_core + n_aux;

  std::vector<std::string> names(n_total);
  std::vector<int> community(n_total);
  for (int i = 0; i < n_core; ++i) {
    names[i] = gene_name("core", i);
    community[i] = i % spec.communities;  // round-robin keeps communities even
  }
  {
    Rng aux_rng(derive_seed(spec.seed, {0xa0cULL}));
    for (int i = 0; i < n_aux; ++i) {
      names[n_core + i] = gene_name("aux", i);
      community[n_core + i] = static_cast<int>(aux_rng.below(spec.communities));
    }
  }

  // SL view: intra-community coin flips over core genes
  {
    std::ofstream out(dir + "/sl_edges.txt", std::ios::trunc);
    if (!out) throw std::runtime_error("synth: cannot write " + dir + "/sl_edges.txt");
    out << "# planted synthetic-lethality view\n";
    Rng rng(derive_seed(spec.seed, {0x51ULL}));
    for (int a = 0; a < n_core; ++a)
      for (int b = a + 1; b < n_core; ++b) {
        if (community[a] != community[b]) continue;
        if (rng.uniform() < spec.sl_prob) out << names[a] << " " << names[b] << "\n";
      }
  }

  // omics views: community-aligned rate interpolated with background
  const double intra =
      spec.correlation * spec.omics_intra_prob +
      (1.0 - spec.correlation) * spec.omics_background_prob;
  const double cross = spec.omics_background_prob;
  for (int view = 0; view < spec.omics_views; ++view) {
    std::ofstream out(dir + "/omics_" + std::to_string(view + 1) + ".txt",
                      std::ios::trunc);
    if (!out)
      throw std::runtime_error("synth: cannot write omics view " + std::to_string(view + 1));
    out << "# omics view " << (view + 1) << "\n";
    Rng rng(derive_seed(spec.seed, {0x0eULL, static_cast<std::uint64_t>(view)}));
    for (int a = 0; a < n_total; ++a)
      for (int b = a + 1; b < n_total; ++b) {
        const double p = community[a] == community[b] ? intra : cross;
        if (rng.uniform() < p) out << names[a] << " " << names[b] << "\n";
      }
  }

  // features: community centroid (+/-1 pattern) plus Gaussian noise
  {
    std::vector<std::vector<double>> centroid(spec.communities,
                                              std::vector<double>(spec.feature_dim));
    Rng crng(derive_seed(spec.seed, {0xce7ULL}));
    for (auto& c : centroid)
      for (double& v : c) v = crng.uniform() < 0.5 ? -1.0 : 1.0;

    std::ofstream out(dir + "/features.csv", std::ios::trunc);
    if (!out) throw std::runtime_error("synth: cannot write " + dir + "/features.csv");
    out << "gene";
    for (int d = 0; d < spec.feature_dim; ++d) out << ",f" << (d + 1);
    out << "\n";
    out << std::setprecision(17);
    Rng frng(derive_seed(spec.seed, {0xfeaULL}));
    for (int i = 0; i < n_total; ++i) {
      out << names[i];
      for (int d = 0; d < spec.feature_dim; ++d)
        out << "," << (centroid[community[i]][d] + spec.feature_noise * frng.gaussian());
      out << "\n";
    }
  }

  // ground-truth manifest
  {
    nlohmann::json j;
    j["spec"]["core_genes"] = spec.core_genes;
    j["spec"]["communities"] = spec.communities;
    j["spec"]["sl_prob"] = spec.sl_prob;
    j["spec"]["omics_views"] = spec.omics_views;
    j["spec"]["correlation"] = spec.correlation;
    j["spec"]["noncore_per_view"] = spec.noncore_per_view;
    j["spec"]["feature_noise"] = spec.feature_noise;
    j["spec"]["feature_dim"] = spec.feature_dim;
    j["spec"]["omics_intra_prob"] = spec.omics_intra_prob;
    j["spec"]["omics_background_prob"] = spec.omics_background_prob;
    j["spec"]["seed"] = spec.seed;
    nlohmann::json comm = nlohmann::json::object();
    for (int i = 0; i < n_total; ++i) comm[names[i]] = community[i];
    j["community"] = comm;
    std::ofstream out(dir + "/manifest.json", std::ios::trunc);
    if (!out) throw std::runtime_error("synth: cannot write " + dir + "/manifest.json");
    out << j.dump(2) << "\n";
  }
}

}  // namespace msgt
