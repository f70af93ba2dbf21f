#pragma once

#include <cstdint>
#include <vector>

#include "msgt/graph.hpp"
#include "msgt/tensor.hpp"

namespace msgt {

// Per-view, per-layer GCN weights. Views share layer shapes, not values.
struct MvgnnParams {
  // weights[layer][view], layer 0 maps dims[0] -> dims[1]
  std::vector<std::vector<Tensor>> weights;
  std::vector<Tensor> biases;  // one 1 x dims[l+1] bias per layer, empty when disabled
  Activation activation = Activation::kRelu;
  bool use_bias = false;

  int layer_count() const { return static_cast<int>(weights.size()); }
  int view_count() const { return weights.empty() ? 0 : static_cast<int>(weights[0].size()); }
};

// dims = [D0, D1, ..., DL]. Glorot-uniform init, each matrix seeded by
// (seed, layer, view) so parallel construction order cannot matter.
MvgnnParams init_mvgnn(int views, int layers, const std::vector<int>& dims,
                       Activation activation, std::uint64_t seed, bool use_bias = false);

Tensor glorot(int rows, int cols, std::uint64_t seed);

// One GCN layer on one view: activation(A_hat * F_prev * W).
Tensor view_forward(const Tensor& a_hat, const Tensor& f_prev, const Tensor& weight,
                    Activation activation);
Tensor view_forward(const SparseMatrix& a_hat, const Tensor& f_prev, const Tensor& weight,
                    Activation activation);

// Final per-view feature matrices, each aligned to its view vocabulary.
struct ViewFeatures {
  std::vector<Tensor> per_view;  // per_view[i] is N_i x D_L
};

// Runs all L layers on every view. `features` rows follow the global vocab;
// each view sees the rows of its member genes. Adjacencies are consumed in
// sparse form; results equal the dense definition exactly.
ViewFeatures mvgnn_forward(const MultiViewGraph& mv,
                           const std::vector<SparseMatrix>& adjacencies,
                           const Tensor& features, const MvgnnParams& params);

// Per-view adjacency matrices for mvgnn_forward, SL view first. The SL view
// adjacency is the caller's business (training masks val/test edges).
std::vector<SparseMatrix> view_adjacencies(const MultiViewGraph& mv);

}  // namespace msgt
