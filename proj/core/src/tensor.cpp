#include "msgt/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace msgt {

namespace {
std::atomic<std::uint64_t> g_tape_counter{1};
thread_local Tape* g_active_tape = nullptr;
}  // namespace

Tensor::Tensor(int rows, int cols) : store_(std::make_shared<Store>()) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("Tensor: negative dimension");
  store_->rows = rows;
  store_->cols = cols;
  store_->v.assign(static_cast<std::size_t>(rows) * cols, 0.0);
}

Tensor Tensor::filled(int rows, int cols, double value) {
  Tensor t(rows, cols);
  std::fill(t.values().begin(), t.values().end(), value);
  return t;
}

Tensor Tensor::identity(int n) {
  Tensor t(n, n);
  for (int i = 0; i < n; ++i) t.at(i, i) = 1.0;
  return t;
}

Tensor Tensor::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r == 0 ? 0 : static_cast<int>(rows.begin()->size());
  Tensor t(r, c);
  int i = 0;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != c)
      throw std::invalid_argument("Tensor::from_rows: ragged rows");
    int j = 0;
    for (double v : row) t.at(i, j++) = v;
    ++i;
  }
  return t;
}

Tensor Tensor::row(std::initializer_list<double> values) {
  Tensor t(1, static_cast<int>(values.size()));
  int j = 0;
  for (double v : values) t.at(0, j++) = v;
  return t;
}

double Tensor::scalar() const {
  if (!is_scalar()) throw std::logic_error("Tensor::scalar: shape is " + shape_str());
  return store_->v[0];
}

Tensor Tensor::clone() const {
  Tensor t(rows(), cols());
  t.store_->v = store_->v;
  return t;
}

std::string Tensor::shape_str() const {
  std::ostringstream os;
  os << rows() << "x" << cols();
  return os.str();
}

SparseMatrix SparseMatrix::from_dense(const Tensor& dense) {
  SparseMatrix s;
  s.rows = dense.rows();
  s.cols = dense.cols();
  s.row_ptr.assign(s.rows + 1, 0);
  for (int i = 0; i < s.rows; ++i) {
    for (int j = 0; j < s.cols; ++j) {
      const double v = dense.at(i, j);
      if (v != 0.0) {
        s.col_idx.push_back(j);
        s.vals.push_back(v);
      }
    }
    s.row_ptr[i + 1] = static_cast<int>(s.col_idx.size());
  }
  return s;
}

Tensor SparseMatrix::to_dense() const {
  Tensor d(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) d.at(i, col_idx[k]) = vals[k];
  return d;
}

Tape::Tape() : id_(g_tape_counter.fetch_add(1)), previous_active_(g_active_tape) {
  g_active_tape = this;
}

Tape::~Tape() { g_active_tape = previous_active_; }

Tape* Tape::active() { return g_active_tape; }

bool Tensor::linked_to(const Tape& t) const {
  return tape_ == &t && tape_id_ == t.id() && node_ >= 0;
}

void Tape::watch(Tensor& t, bool requires_grad) {
  if (t.linked_to(*this)) {
    nodes_[t.node_].needs_grad = nodes_[t.node_].needs_grad || requires_grad;
    t.requires_grad_ = t.requires_grad_ || requires_grad;
    return;
  }
  Node n;
  n.rows = t.rows();
  n.cols = t.cols();
  n.needs_grad = requires_grad;
  nodes_.push_back(std::move(n));
  t.tape_ = this;
  t.tape_id_ = id_;
  t.node_ = static_cast<int>(nodes_.size()) - 1;
  t.requires_grad_ = requires_grad;
}

int Tape::record(Tensor& out, std::vector<int> parents, PullFn pull) {
  Node n;
  n.rows = out.rows();
  n.cols = out.cols();
  n.parents = std::move(parents);
  n.pull = std::move(pull);
  for (int p : n.parents)
    if (p >= 0 && nodes_[p].needs_grad) n.needs_grad = true;
  nodes_.push_back(std::move(n));
  out.tape_ = this;
  out.tape_id_ = id_;
  out.node_ = static_cast<int>(nodes_.size()) - 1;
  return out.node_;
}

void Tape::accumulate(int node, const Tensor& delta) {
  if (node < 0) return;
  Node& n = nodes_[node];
  if (!n.needs_grad) return;
  Tensor& g = grads_[node];
  if (g.empty() && !(n.rows == 0 || n.cols == 0)) g = Tensor(n.rows, n.cols);
  if (delta.rows() != n.rows || delta.cols() != n.cols)
    throw std::logic_error("Tape::accumulate: gradient shape mismatch");
  auto& gv = g.values();
  const auto& dv = delta.values();
  for (std::size_t i = 0; i < gv.size(); ++i) gv[i] += dv[i];
}

const Tensor& Tape::grad_at(int node) const {
  static const Tensor kEmpty;
  if (node < 0 || node >= static_cast<int>(grads_.size())) return kEmpty;
  return grads_[node];
}

void Tape::backward(const Tensor& loss) {
  if (backward_done_)
    throw std::logic_error(
        "Tape::backward: tape already consumed; re-run the forward pass before "
        "calling backward again");
  if (!loss.linked_to(*this))
    throw std::logic_error("Tape::backward: loss is not recorded on this tape");
  if (!loss.is_scalar())
    throw std::logic_error("Tape::backward: loss must be scalar, got " + loss.shape_str());
  backward_done_ = true;
  // Recording is suspended for the whole pass so ops used inside pull
  // closures cannot append to the tape being walked.
  Tape* const saved_active = g_active_tape;
  g_active_tape = nullptr;
  grads_.assign(nodes_.size(), Tensor());
  grads_[loss.node_] = Tensor::filled(1, 1, 1.0);
  for (int i = loss.node_; i >= 0; --i) {
    Node& n = nodes_[i];
    if (!n.pull) continue;               // leaf
    if (grads_[i].empty()) continue;     // not reached from the loss
    if (!n.needs_grad) continue;
    n.pull(*this, i);
  }
  g_active_tape = saved_active;
}

Tensor Tape::grad(const Tensor& t) const {
  if (!backward_done_) throw std::logic_error("Tape::grad: backward has not run");
  if (!t.linked_to(*this))
    throw std::logic_error("Tape::grad: tensor is not on this tape");
  const Tensor& g = grads_[t.node_];
  if (g.empty()) return Tensor(t.rows(), t.cols());
  return g;
}

Activation activation_from_string(const std::string& name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  if (name == "identity") return Activation::kIdentity;
  throw std::invalid_argument("unknown activation: " + name);
}

std::string to_string(Activation a) {
  switch (a) {
    case Activation::kRelu: return "relu";
    case Activation::kTanh: return "tanh";
    case Activation::kIdentity: return "identity";
  }
  return "?";
}

namespace {

// The active tape records an op only when some input is linked to it; inputs
// linked to dead tapes act as constants.
Tape* resolve_tape(std::initializer_list<const Tensor*> inputs) {
  Tape* act = Tape::active();
  if (act == nullptr) return nullptr;
  for (const Tensor* t : inputs)
    if (t->linked_to(*act)) return act;
  return nullptr;
}

int node_of(const Tensor& t, Tape* tape) {
  return (tape != nullptr && t.linked_to(*tape)) ? t.node() : -1;
}

// C += A * B, plain loops, fixed summation order (k ascending per output).
void matmul_acc(const Tensor& a, const Tensor& b, Tensor& c) {
  const int m = a.rows(), k = a.cols(), n = b.cols();
  for (int i = 0; i < m; ++i) {
    double* ci = c.row_ptr(i);
    const double* ai = a.row_ptr(i);
    for (int p = 0; p < k; ++p) {
      const double av = ai[p];
      if (av == 0.0) continue;
      const double* bp = b.row_ptr(p);
      for (int j = 0; j < n; ++j) ci[j] += av * bp[j];
    }
  }
}

// C += A^T * B
void matmul_ta_acc(const Tensor& a, const Tensor& b, Tensor& c) {
  const int m = a.rows(), k = a.cols(), n = b.cols();
  for (int p = 0; p < m; ++p) {
    const double* ap = a.row_ptr(p);
    const double* bp = b.row_ptr(p);
    for (int i = 0; i < k; ++i) {
      const double av = ap[i];
      if (av == 0.0) continue;
      double* ci = c.row_ptr(i);
      for (int j = 0; j < n; ++j) ci[j] += av * bp[j];
    }
  }
}

// C += A * B^T
void matmul_tb_acc(const Tensor& a, const Tensor& b, Tensor& c) {
  const int m = a.rows(), k = a.cols(), n = b.rows();
  for (int i = 0; i < m; ++i) {
    const double* ai = a.row_ptr(i);
    double* ci = c.row_ptr(i);
    for (int j = 0; j < n; ++j) {
      const double* bj = b.row_ptr(j);
      double acc = 0.0;
      for (int p = 0; p < k; ++p) acc += ai[p] * bj[p];
      ci[j] += acc;
    }
  }
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows())
    throw std::invalid_argument("matmul: inner dimensions differ: " + a.shape_str() +
                                " vs " + b.shape_str());
  Tensor out(a.rows(), b.cols());
  matmul_acc(a, b, out);
  Tape* tape = resolve_tape({&a, &b});
  if (tape) {
    const int pa = node_of(a, tape), pb = node_of(b, tape);
    tape->record(out, {pa, pb}, [a, b, pa, pb](Tape& t, int self) {
      const Tensor& g = t.grad_at(self);
      if (pa >= 0 && t.needs_grad(pa)) {
        Tensor da(a.rows(), a.cols());
        matmul_tb_acc(g, b, da);  // dA = dC * B^T
        t.accumulate(pa, da);
      }
      if (pb >= 0 && t.needs_grad(pb)) {
        Tensor db(b.rows(), b.cols());
        matmul_ta_acc(a, g, db);  // dB = A^T * dC
        t.accumulate(pb, db);
      }
    });
  }
  return out;
}

Tensor spmm(const SparseMatrix& a, const Tensor& b) {
  if (a.cols != b.rows())
    throw std::invalid_argument("spmm: inner dimensions differ: " + std::to_string(a.rows) +
                                "x" + std::to_string(a.cols) + " vs " + b.shape_str());
  Tensor out(a.rows, b.cols());
  const int n = b.cols();
  for (int i = 0; i < a.rows; ++i) {
    double* oi = out.row_ptr(i);
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const double av = a.vals[k];
      const double* br = b.row_ptr(a.col_idx[k]);
      for (int j = 0; j < n; ++j) oi[j] += av * br[j];
    }
  }
  Tape* tape = resolve_tape({&b});
  if (tape) {
    const int pb = node_of(b, tape);
    tape->record(out, {pb}, [a, b, pb](Tape& t, int self) {
      const Tensor& g = t.grad_at(self);
      Tensor db(b.rows(), b.cols());
      // dB = A^T * dC; iterate A row-wise so accumulation order is fixed.
      const int n = g.cols();
      for (int i = 0; i < a.rows; ++i) {
        const double* gi = g.row_ptr(i);
        for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
          double* dbr = db.row_ptr(a.col_idx[k]);
          const double av = a.vals[k];
          for (int j = 0; j < n; ++j) dbr[j] += av * gi[j];
        }
      }
      t.accumulate(pb, db);
    });
  }
  return out;
}

Tensor transpose(const Tensor& x) {
  Tensor out(x.cols(), x.rows());
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j) out.at(j, i) = x.at(i, j);
  Tape* tape = resolve_tape({&x});
  if (tape) {
    const int px = node_of(x, tape);
    tape->record(out, {px}, [px](Tape& t, int self) {
      t.accumulate(px, transpose(t.grad_at(self)));
    });
  }
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("add: shape mismatch: " + a.shape_str() + " vs " +
                                b.shape_str());
  Tensor out(a.rows(), a.cols());
  const auto& av = a.values();
  const auto& bv = b.values();
  auto& ov = out.values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] + bv[i];
  Tape* tape = resolve_tape({&a, &b});
  if (tape) {
    const int pa = node_of(a, tape), pb = node_of(b, tape);
    tape->record(out, {pa, pb}, [pa, pb](Tape& t, int self) {
      const Tensor& g = t.grad_at(self);
      t.accumulate(pa, g);
      t.accumulate(pb, g);
    });
  }
  return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("mul: shape mismatch: " + a.shape_str() + " vs " +
                                b.shape_str());
  Tensor out(a.rows(), a.cols());
  const auto& av = a.values();
  const auto& bv = b.values();
  auto& ov = out.values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] * bv[i];
  Tape* tape = resolve_tape({&a, &b});
  if (tape) {
    const int pa = node_of(a, tape), pb = node_of(b, tape);
    tape->record(out, {pa, pb}, [a, b, pa, pb](Tape& t, int self) {
      const Tensor& g = t.grad_at(self);
      if (pa >= 0 && t.needs_grad(pa)) t.accumulate(pa, mul(g, b));
      if (pb >= 0 && t.needs_grad(pb)) t.accumulate(pb, mul(g, a));
    });
  }
  return out;
}

Tensor add_row_bias(const Tensor& x, const Tensor& bias) {
  if (bias.rows() != 1 || bias.cols() != x.cols())
    throw std::invalid_argument("add_row_bias: bias must be 1x" + std::to_string(x.cols()) +
                                ", got " + bias.shape_str());
  Tensor out(x.rows(), x.cols());
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j) out.at(i, j) = x.at(i, j) + bias.at(0, j);
  Tape* tape = resolve_tape({&x, &bias});
  if (tape) {
    const int px = node_of(x, tape), pb = node_of(bias, tape);
    tape->record(out, {px, pb}, [px, pb](Tape& t, int self) {
      const Tensor& g = t.grad_at(self);
      t.accumulate(px, g);
      if (pb >= 0 && t.needs_grad(pb)) {
        Tensor db(1, g.cols());
        for (int i = 0; i < g.rows(); ++i)
          for (int j = 0; j < g.cols(); ++j) db.at(0, j) += g.at(i, j);
        t.accumulate(pb, db);
      }
    });
  }
  return out;
}

Tensor scale(const Tensor& x, double factor) {
  Tensor out(x.rows(), x.cols());
  const auto& xv = x.values();
  auto& ov = out.values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = xv[i] * factor;
  Tape* tape = resolve_tape({&x});
  if (tape) {
    const int px = node_of(x, tape);
    tape->record(out, {px}, [px, factor](Tape& t, int self) {
      t.accumulate(px, scale(t.grad_at(self), factor));
    });
  }
  return out;
}

Tensor relu(const Tensor& x) {
  Tensor out(x.rows(), x.cols());
  const auto& xv = x.values();
  auto& ov = out.values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = xv[i] > 0.0 ? xv[i] : 0.0;
  Tape* tape = resolve_tape({&x});
  if (tape) {
    const int px = node_of(x, tape);
    tape->record(out, {px}, [x, px](Tape& t, int self) {
      const Tensor& g = t.grad_at(self);
      Tensor dx(x.rows(), x.cols());
      const auto& xv = x.values();
      const auto& gv = g.values();
      auto& dv = dx.values();
      // subgradient at exactly 0 is defined as 0
      for (std::size_t i = 0; i < dv.size(); ++i) dv[i] = xv[i] > 0.0 ? gv[i] : 0.0;
      t.accumulate(px, dx);
    });
  }
  return out;
}

Tensor tanh_act(const Tensor& x) {
  Tensor out(x.rows(), x.cols());
  const auto& xv = x.values();
  auto& ov = out.values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = std::tanh(xv[i]);
  Tape* tape = resolve_tape({&x});
  if (tape) {
    const int px = node_of(x, tape);
    Tensor y = out;  // shares storage; values are final once recorded
    tape->record(out, {px}, [y, px](Tape& t, int self) {
      const Tensor& g = t.grad_at(self);
      Tensor dx(y.rows(), y.cols());
      const auto& yv = y.values();
      const auto& gv = g.values();
      auto& dv = dx.values();
      for (std::size_t i = 0; i < dv.size(); ++i) dv[i] = gv[i] * (1.0 - yv[i] * yv[i]);
      t.accumulate(px, dx);
    });
  }
  return out;
}

Tensor activate(const Tensor& x, Activation a) {
  switch (a) {
    case Activation::kRelu: return relu(x);
    case Activation::kTanh: return tanh_act(x);
    case Activation::kIdentity: return x;
  }
  throw std::logic_error("activate: bad enum");
}

Tensor softmax_rows(const Tensor& x) {
  Tensor out(x.rows(), x.cols());
  for (int i = 0; i < x.rows(); ++i) {
    const double* xi = x.row_ptr(i);
    double* oi = out.row_ptr(i);
    double mx = xi[0];
    for (int j = 1; j < x.cols(); ++j) mx = std::max(mx, xi[j]);
    double sum = 0.0;
    for (int j = 0; j < x.cols(); ++j) {
      oi[j] = std::exp(xi[j] - mx);
      sum += oi[j];
    }
    for (int j = 0; j < x.cols(); ++j) oi[j] /= sum;
  }
  Tape* tape = resolve_tape({&x});
  if (tape) {
    const int px = node_of(x, tape);
    Tensor y = out;
    tape->record(out, {px}, [y, px](Tape& t, int self) {
      const Tensor& g = t.grad_at(self);
      Tensor dx(y.rows(), y.cols());
      for (int i = 0; i < y.rows(); ++i) {
        const double* yi = y.row_ptr(i);
        const double* gi = g.row_ptr(i);
        double* di = dx.row_ptr(i);
        double dot = 0.0;
        for (int j = 0; j < y.cols(); ++j) dot += gi[j] * yi[j];
        for (int j = 0; j < y.cols(); ++j) di[j] = yi[j] * (gi[j] - dot);
      }
      t.accumulate(px, dx);
    });
  }
  return out;
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: no parts");
  const int m = parts[0].rows();
  int total = 0;
  for (const Tensor& p : parts) {
    if (p.rows() != m)
      throw std::invalid_argument("concat_cols: row mismatch: " + parts[0].shape_str() +
                                  " vs " + p.shape_str());
    total += p.cols();
  }
  Tensor out(m, total);
  int off = 0;
  for (const Tensor& p : parts) {
    for (int i = 0; i < m; ++i) {
      const double* pi = p.row_ptr(i);
      double* oi = out.row_ptr(i) + off;
      for (int j = 0; j < p.cols(); ++j) oi[j] = pi[j];
    }
    off += p.cols();
  }
  Tape* tape = nullptr;
  {
    Tape* act = Tape::active();
    if (act != nullptr)
      for (const Tensor& p : parts)
        if (p.linked_to(*act)) {
          tape = act;
          break;
        }
  }
  if (tape) {
    std::vector<int> parents;
    std::vector<int> widths;
    for (const Tensor& p : parts) {
      parents.push_back(node_of(p, tape));
      widths.push_back(p.cols());
    }
    tape->record(out, parents, [parents, widths, m](Tape& t, int self) {
      const Tensor& g = t.grad_at(self);
      int off = 0;
      for (std::size_t k = 0; k < parents.size(); ++k) {
        const int w = widths[k];
        if (parents[k] >= 0 && t.needs_grad(parents[k])) {
          Tensor dp(m, w);
          for (int i = 0; i < m; ++i) {
            const double* gi = g.row_ptr(i) + off;
            double* di = dp.row_ptr(i);
            for (int j = 0; j < w; ++j) di[j] = gi[j];
          }
          t.accumulate(parents[k], dp);
        }
        off += w;
      }
    });
  }
  return out;
}

namespace {

Tensor gather_impl(const Tensor& x, const std::vector<int>& ids, bool allow_zero) {
  for (int id : ids) {
    if (id == -1 && allow_zero) continue;
    if (id < 0 || id >= x.rows())
      throw std::out_of_range("gather_rows: id " + std::to_string(id) +
                              " out of range [0, " + std::to_string(x.rows()) + ")");
  }
  Tensor out(static_cast<int>(ids.size()), x.cols());
  for (std::size_t r = 0; r < ids.size(); ++r) {
    if (ids[r] == -1) continue;  // stays zero
    const double* src = x.row_ptr(ids[r]);
    double* dst = out.row_ptr(static_cast<int>(r));
    for (int j = 0; j < x.cols(); ++j) dst[j] = src[j];
  }
  Tape* tape = resolve_tape({&x});
  if (tape) {
    const int px = node_of(x, tape);
    const int xr = x.rows(), xc = x.cols();
    tape->record(out, {px}, [px, ids, xr, xc](Tape& t, int self) {
      const Tensor& g = t.grad_at(self);
      Tensor dx(xr, xc);
      for (std::size_t r = 0; r < ids.size(); ++r) {
        if (ids[r] == -1) continue;
        const double* gi = g.row_ptr(static_cast<int>(r));
        double* di = dx.row_ptr(ids[r]);
        for (int j = 0; j < xc; ++j) di[j] += gi[j];  // duplicates scatter-add
      }
      t.accumulate(px, dx);
    });
  }
  return out;
}

}  // namespace

Tensor gather_rows(const Tensor& x, const std::vector<int>& ids) {
  return gather_impl(x, ids, false);
}

Tensor gather_rows_or_zero(const Tensor& x, const std::vector<int>& ids) {
  return gather_impl(x, ids, true);
}

Tensor cross_entropy_rows(const Tensor& logits, const std::vector<int>& labels) {
  if (logits.rows() == 0) throw std::invalid_argument("cross_entropy_rows: empty batch");
  if (static_cast<int>(labels.size()) != logits.rows())
    throw std::invalid_argument("cross_entropy_rows: " + std::to_string(labels.size()) +
                                " labels for " + logits.shape_str() + " logits");
  for (int y : labels)
    if (y < 0 || y >= logits.cols())
      throw std::invalid_argument("cross_entropy_rows: label out of range");
  const int p = logits.rows(), c = logits.cols();
  double total = 0.0;
  for (int i = 0; i < p; ++i) {
    const double* li = logits.row_ptr(i);
    double mx = li[0];
    for (int j = 1; j < c; ++j) mx = std::max(mx, li[j]);
    double sum = 0.0;
    for (int j = 0; j < c; ++j) sum += std::exp(li[j] - mx);
    total += mx + std::log(sum) - li[labels[i]];
  }
  Tensor out = Tensor::filled(1, 1, total / p);
  Tape* tape = resolve_tape({&logits});
  if (tape) {
    const int pl = node_of(logits, tape);
    Tensor lg = logits;
    tape->record(out, {pl}, [lg, labels, pl](Tape& t, int self) {
      const double up = t.grad_at(self).scalar();
      const int p = lg.rows(), c = lg.cols();
      Tensor dl(p, c);
      for (int i = 0; i < p; ++i) {
        const double* li = lg.row_ptr(i);
        double* di = dl.row_ptr(i);
        double mx = li[0];
        for (int j = 1; j < c; ++j) mx = std::max(mx, li[j]);
        double sum = 0.0;
        for (int j = 0; j < c; ++j) {
          di[j] = std::exp(li[j] - mx);
          sum += di[j];
        }
        for (int j = 0; j < c; ++j) {
          di[j] /= sum;
          if (j == labels[i]) di[j] -= 1.0;
          di[j] *= up / p;
        }
      }
      t.accumulate(pl, dl);
    });
  }
  return out;
}

Tensor sum_all(const Tensor& x) {
  double s = 0.0;
  for (double v : x.values()) s += v;
  Tensor out = Tensor::filled(1, 1, s);
  Tape* tape = resolve_tape({&x});
  if (tape) {
    const int px = node_of(x, tape);
    const int r = x.rows(), c = x.cols();
    tape->record(out, {px}, [px, r, c](Tape& t, int self) {
      t.accumulate(px, Tensor::filled(r, c, t.grad_at(self).scalar()));
    });
  }
  return out;
}

Tensor mean_all(const Tensor& x) {
  if (x.size() == 0) throw std::invalid_argument("mean_all: empty tensor");
  return scale(sum_all(x), 1.0 / static_cast<double>(x.size()));
}

double finite_diff_check(const std::function<double(const Tensor&)>& value_at,
                         const Tensor& x, const Tensor& analytic, double eps) {
  if (analytic.rows() != x.rows() || analytic.cols() != x.cols())
    throw std::invalid_argument("finite_diff_check: gradient shape " + analytic.shape_str() +
                                " does not match input " + x.shape_str());
  double worst = 0.0;
  Tensor probe = x.clone();
  for (int i = 0; i < x.rows(); ++i) {
    for (int j = 0; j < x.cols(); ++j) {
      const double orig = probe.at(i, j);
      probe.at(i, j) = orig + eps;
      const double fp = value_at(probe);
      probe.at(i, j) = orig - eps;
      const double fm = value_at(probe);
      probe.at(i, j) = orig;
      const double numeric = (fp - fm) / (2.0 * eps);
      const double a = analytic.at(i, j);
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-6});
      worst = std::max(worst, std::abs(a - numeric) / denom);
    }
  }
  return worst;
}

}  // namespace msgt
