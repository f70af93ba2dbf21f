#include "msgt/mvgnn.hpp"

#include <cmath>
#include <stdexcept>

#include "msgt/rng.hpp"

namespace msgt {

Tensor glorot(int rows, int cols, std::uint64_t seed) {
  if (rows <= 0 || cols <= 0)
    throw std::invalid_argument("glorot: non-positive dimension");
  const double limit = std::sqrt(6.0 / (rows + cols));
  Rng rng(seed);
  Tensor t(rows, cols);
  for (double& v : t.values()) v = (2.0 * rng.uniform() - 1.0) * limit;
  return t;
}

MvgnnParams init_mvgnn(int views, int layers, const std::vector<int>& dims,
                       Activation activation, std::uint64_t seed, bool use_bias) {
  if (layers < 1) throw std::invalid_argument("init_mvgnn: need at least one layer");
  if (static_cast<int>(dims.size()) != layers + 1)
    throw std::invalid_argument("init_mvgnn: dims must have layers+1 entries");
  for (int d : dims)
    if (d <= 0) throw std::invalid_argument("init_mvgnn: non-positive dimension");
  MvgnnParams p;
  p.activation = activation;
  p.use_bias = use_bias;
  p.weights.resize(layers);
  for (int l = 0; l < layers; ++l) {
    p.weights[l].reserve(views);
    for (int i = 0; i < views; ++i) {
      p.weights[l].push_back(glorot(
          dims[l], dims[l + 1],
          derive_seed(seed, {0x317eULL, static_cast<std::uint64_t>(l),
                             static_cast<std::uint64_t>(i)})));
    }
    if (use_bias) p.biases.push_back(Tensor(1, dims[l + 1]));
  }
  return p;
}

Tensor view_forward(const Tensor& a_hat, const Tensor& f_prev, const Tensor& weight,
                    Activation activation) {
  return activate(matmul(a_hat, matmul(f_prev, weight)), activation);
}

Tensor view_forward(const SparseMatrix& a_hat, const Tensor& f_prev, const Tensor& weight,
                    Activation activation) {
  return activate(spmm(a_hat, matmul(f_prev, weight)), activation);
}

std::vector<SparseMatrix> view_adjacencies(const MultiViewGraph& mv) {
  std::vector<SparseMatrix> out;
  out.reserve(mv.view_count());
  for (int i = 0; i < mv.view_count(); ++i)
    out.push_back(normalized_adjacency_sparse(mv.view(i)));
  return out;
}

ViewFeatures mvgnn_forward(const MultiViewGraph& mv,
                           const std::vector<SparseMatrix>& adjacencies,
                           const Tensor& features, const MvgnnParams& params) {
  if (static_cast<int>(adjacencies.size()) != mv.view_count())
    throw std::invalid_argument("mvgnn_forward: adjacency count != view count");
  if (features.rows() != mv.global_size())
    throw std::invalid_argument("mvgnn_forward: feature rows (" +
                                std::to_string(features.rows()) +
                                ") do not cover the global vocab (" +
                                std::to_string(mv.global_size()) + ")");
  if (params.view_count() != mv.view_count())
    throw std::invalid_argument("mvgnn_forward: params built for " +
                                std::to_string(params.view_count()) + " views, graph has " +
                                std::to_string(mv.view_count()));
  ViewFeatures out;
  out.per_view.reserve(mv.view_count());
  for (int i = 0; i < mv.view_count(); ++i) {
    Tensor f = gather_rows(features, mv.local_to_global(i));
    for (int l = 0; l < params.layer_count(); ++l) {
      Tensor pre = spmm(adjacencies[i], matmul(f, params.weights[l][i]));
      if (params.use_bias) pre = add_row_bias(pre, params.biases[l]);
      f = activate(pre, params.activation);
    }
    out.per_view.push_back(std::move(f));
  }
  return out;
}

}  // namespace msgt
