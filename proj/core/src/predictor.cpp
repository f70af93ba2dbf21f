#include "msgt/predictor.hpp"

#include <cmath>
#include <stdexcept>

#include "msgt/mvgnn.hpp"
#include "msgt/rng.hpp"

namespace msgt {

ClassifierParams init_classifier(int pair_dim, std::uint64_t seed) {
  return ClassifierParams{glorot(pair_dim, 2, derive_seed(seed, {0xc1fULL}))};
}

std::pair<Tensor, std::vector<int>> extract_core(const Tensor& attn_out,
                                                 const AssembledBatch& ab) {
  if (attn_out.rows() != static_cast<int>(ab.row_ids.size()))
    throw std::invalid_argument("extract_core: attention rows do not match batch rows");
  std::vector<int> rows;
  std::vector<int> ids;
  for (std::size_t r = 0; r < ab.core_mask.size(); ++r) {
    if (ab.core_mask[r]) {
      rows.push_back(static_cast<int>(r));
      ids.push_back(ab.row_ids[r]);
    }
  }
  if (rows.empty())
    throw std::runtime_error("extract_core: batch contains no core genes");
  return {gather_rows(attn_out, rows), std::move(ids)};
}

Tensor pair_features(const Tensor& core_features,
                     const std::vector<std::pair<int, int>>& pairs,
                     bool include_product) {
  std::vector<int> firsts, seconds;
  firsts.reserve(pairs.size());
  seconds.reserve(pairs.size());
  for (const auto& [j, k] : pairs) {
    if (j == k)
      throw std::invalid_argument("pair_features: self-pair (" + std::to_string(j) +
                                  ", " + std::to_string(j) + ") is not a valid edge");
    firsts.push_back(j);
    seconds.push_back(k);
  }
  Tensor lhs = gather_rows(core_features, firsts);
  Tensor rhs = gather_rows(core_features, seconds);
  if (!include_product) return concat_cols({lhs, rhs});
  return concat_cols({lhs, rhs, mul(lhs, rhs)});
}

Tensor edge_logits(const Tensor& pair_feats, const ClassifierParams& clf) {
  return matmul(pair_feats, clf.weight);
}

Tensor batch_loss(const Tensor& logits, const std::vector<int>& labels) {
  return cross_entropy_rows(logits, labels);
}

namespace {

// P(SL | logits row), numerically stable.
double sl_probability(double logit_neg, double logit_pos) {
  const double m = std::max(logit_neg, logit_pos);
  const double e_neg = std::exp(logit_neg - m);
  const double e_pos = std::exp(logit_pos - m);
  return e_pos / (e_neg + e_pos);
}

}  // namespace

double predict_pair(const Tensor& core_features, int j, int k,
                    const ClassifierParams& clf, bool include_product) {
  if (j == k) throw std::invalid_argument("predict_pair: self-pair");
  if (j < 0 || j >= core_features.rows() || k < 0 || k >= core_features.rows())
    throw std::out_of_range("predict_pair: row index out of range");
  const int d = core_features.cols();
  Tensor pf(2, include_product ? 3 * d : 2 * d);
  for (int c = 0; c < d; ++c) {
    pf.at(0, c) = core_features.at(j, c);
    pf.at(0, d + c) = core_features.at(k, c);
    pf.at(1, c) = core_features.at(k, c);
    pf.at(1, d + c) = core_features.at(j, c);
    if (include_product) {
      const double prod = core_features.at(j, c) * core_features.at(k, c);
      pf.at(0, 2 * d + c) = prod;
      pf.at(1, 2 * d + c) = prod;
    }
  }
  Tensor logits = matmul(pf, clf.weight);
  const double p_jk = sl_probability(logits.at(0, 0), logits.at(0, 1));
  const double p_kj = sl_probability(logits.at(1, 0), logits.at(1, 1));
  return 0.5 * (p_jk + p_kj);
}

}  // namespace msgt
