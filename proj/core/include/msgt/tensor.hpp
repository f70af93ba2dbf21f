#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <string>
#include <vector>

namespace msgt {

class Tape;

// Dense row-major matrix of 64-bit floats. Copies are shallow (shared
// storage); clone() makes a deep, detached copy. A Tensor may carry a link to
// the Tape node that produced it; the link is rewritten whenever the tensor is
// re-watched on a fresh tape.
class Tensor {
 public:
  Tensor() : store_(std::make_shared<Store>()) {}
  Tensor(int rows, int cols);

  static Tensor zeros(int rows, int cols) { return Tensor(rows, cols); }
  static Tensor filled(int rows, int cols, double value);
  static Tensor identity(int n);
  static Tensor from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Tensor row(std::initializer_list<double> values);

  int rows() const { return store_->rows; }
  int cols() const { return store_->cols; }
  std::size_t size() const { return store_->v.size(); }
  bool empty() const { return store_->v.empty(); }
  bool is_scalar() const { return rows() == 1 && cols() == 1; }

  double at(int r, int c) const { return store_->v[static_cast<std::size_t>(r) * cols() + c]; }
  double& at(int r, int c) { return store_->v[static_cast<std::size_t>(r) * cols() + c]; }
  double scalar() const;

  const std::vector<double>& values() const { return store_->v; }
  std::vector<double>& values() { return store_->v; }
  const double* row_ptr(int r) const { return store_->v.data() + static_cast<std::size_t>(r) * cols(); }
  double* row_ptr(int r) { return store_->v.data() + static_cast<std::size_t>(r) * cols(); }

  Tensor clone() const;

  bool requires_grad() const { return requires_grad_; }
  // True when this tensor is a recorded node of `t` (same tape generation).
  bool linked_to(const Tape& t) const;
  int node() const { return node_; }

  std::string shape_str() const;

 private:
  struct Store {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;
  };
  std::shared_ptr<Store> store_;
  Tape* tape_ = nullptr;
  std::uint64_t tape_id_ = 0;
  int node_ = -1;
  bool requires_grad_ = false;

  friend class Tape;
};

// Compressed sparse row matrix used for the large omics adjacencies. Always a
// constant in the computation graph (adjacency values are not trainable).
struct SparseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> row_ptr;  // rows + 1 entries
  std::vector<int> col_idx;
  std::vector<double> vals;

  static SparseMatrix from_dense(const Tensor& dense);
  Tensor to_dense() const;
  int nnz() const { return static_cast<int>(col_idx.size()); }
};

// Reverse-mode gradient tape. Nodes are recorded in execution order; backward
// visits them exactly once in reverse, so gradient accumulation order is fixed
// and runs are bit-reproducible. A tape is single use: after backward() it
// must be rebuilt by re-running the forward pass.
//
// Constructing a Tape makes it the active recorder for the current thread;
// destruction restores the previous one. Ops record onto the active tape only
// when at least one input is linked to it, so tensors that merely carry a
// link to a dead tape behave as constants. Each tape has a process-unique
// generation id, which makes stale links harmless even if a later tape reuses
// the same address.
class Tape {
 public:
  Tape();
  ~Tape();
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  static Tape* active();
  std::uint64_t id() const { return id_; }

  // Registers `t` as a leaf on this tape. Safe to call on a tensor that was
  // watched by an earlier (discarded) tape; the link is simply rewritten.
  void watch(Tensor& t, bool requires_grad = true);

  void backward(const Tensor& loss);
  bool backward_done() const { return backward_done_; }

  // Gradient of the last backward() pass w.r.t. a watched tensor. Zero if the
  // tensor never influenced the loss.
  Tensor grad(const Tensor& t) const;

  std::size_t node_count() const { return nodes_.size(); }

  // --- used by the op implementations ---
  using PullFn = std::function<void(Tape&, int self)>;
  int record(Tensor& out, std::vector<int> parents, PullFn pull);
  void accumulate(int node, const Tensor& delta);
  const Tensor& grad_at(int node) const;
  bool needs_grad(int node) const { return nodes_[node].needs_grad; }

 private:
  struct Node {
    int rows = 0;
    int cols = 0;
    std::vector<int> parents;
    PullFn pull;  // empty for leaves
    bool needs_grad = false;
  };
  std::vector<Node> nodes_;
  std::vector<Tensor> grads_;
  bool backward_done_ = false;
  std::uint64_t id_ = 0;
  Tape* previous_active_ = nullptr;
};

enum class Activation { kRelu, kTanh, kIdentity };
Activation activation_from_string(const std::string& name);
std::string to_string(Activation a);

// --- differentiable ops -----------------------------------------------------
// Each op computes its forward value eagerly. If any input is linked to a
// tape, the result is recorded there; inputs linked to different tapes are an
// error. Ops on unlinked tensors run in plain inference mode.

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor spmm(const SparseMatrix& a, const Tensor& b);
Tensor transpose(const Tensor& x);
Tensor add(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);  // element-wise
Tensor add_row_bias(const Tensor& x, const Tensor& bias);
Tensor scale(const Tensor& x, double factor);
Tensor relu(const Tensor& x);
Tensor tanh_act(const Tensor& x);
Tensor activate(const Tensor& x, Activation a);
Tensor softmax_rows(const Tensor& x);
Tensor concat_cols(const std::vector<Tensor>& parts);
Tensor gather_rows(const Tensor& x, const std::vector<int>& ids);
// Like gather_rows but an id of -1 yields a zero row (gene absent from a view).
Tensor gather_rows_or_zero(const Tensor& x, const std::vector<int>& ids);
Tensor cross_entropy_rows(const Tensor& logits, const std::vector<int>& labels);
Tensor sum_all(const Tensor& x);
Tensor mean_all(const Tensor& x);

// --- gradient oracle ---------------------------------------------------------
// Central-difference check: evaluates `value_at` (a tape-free scalar forward)
// around x and compares against `analytic`. Returns the max element-wise
// relative error with denominator max(|a|, |n|, 1e-6).
double finite_diff_check(const std::function<double(const Tensor&)>& value_at,
                         const Tensor& x, const Tensor& analytic,
                         double eps = 1e-5);

}  // namespace msgt
