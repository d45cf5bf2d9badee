#include "sgner/tape.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sgner/kernels.hpp"

namespace sgner {

Parameter::Parameter(std::string name_, Tensor value_, ParamGroup group_)
    : name(std::move(name_)),
      value(std::move(value_)),
      grad(value.rows(), value.cols()),
      group(group_) {}

const Tensor& Var::value() const { return tape_->value(id_); }

Var Tape::constant(Tensor value) { return push(std::move(value), nullptr); }

Var Tape::param(Parameter& p) {
  if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) return Var(this, it->second);
  Var v = push(Tensor(), nullptr);
  nodes_[v.id()].external = &p.value;
  nodes_[v.id()].param = &p;
  param_nodes_.emplace(&p, v.id());
  return v;
}

Var Tape::push(Tensor value, Backward backward) {
  Node n;
  n.value = std::move(value);
  if (recording_) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Tensor& Tape::grad(std::size_t id) {
  Node& n = nodes_[id];
  if (n.grad.values().empty()) {
    const Tensor& v = value(id);
    if (v.size() != 0) n.grad = Tensor(v.rows(), v.cols());
  }
  return n.grad;
}

Tensor Tape::grad_of(Var v) const {
  const Node& n = nodes_[v.id()];
  if (n.grad.values().empty()) return Tensor(value(v).rows(), value(v).cols());
  return n.grad;
}

void Tape::backward(Var loss) {
  if (!recording_) throw std::logic_error("backward on a non-recording tape");
  if (consumed_) throw std::logic_error("backward already ran on this tape");
  if (loss.tape() != this) throw std::logic_error("loss belongs to another tape");
  if (value(loss).size() != 1) throw ShapeError("backward expects a scalar loss");
  consumed_ = true;
  grad(loss.id())[0] = 1.0;
  // parameter leaves accumulate into Parameter::grad
  for (std::size_t i = loss.id() + 1; i-- > 0;) {
    if (!has_grad(i)) continue;
    if (nodes_[i].backward) nodes_[i].backward(*this, i);
    if (Parameter* p = nodes_[i].param) {
      const Tensor& g = nodes_[i].grad;
      for (std::size_t k = 0; k < g.size(); ++k) p->grad[k] += g[k];
    }
  }
}

Tensor softmax_rows(const Tensor& x) {
  Tensor out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    double mx = -INFINITY;
    for (std::size_t c = 0; c < x.cols(); ++c) mx = std::max(mx, x(r, c));
    double z = 0.0;
    for (std::size_t c = 0; c < x.cols(); ++c) {
      out(r, c) = std::exp(x(r, c) - mx);
      z += out(r, c);
    }
    for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) /= z;
  }
  return out;
}

namespace ops {

namespace {

Tape& same_tape(Var a, Var b) {
  if (!a.valid() || a.tape() != b.tape()) throw std::logic_error("operands on different tapes");
  return *a.tape();
}

void require(bool ok, const std::string& what, const Tensor& a, const Tensor& b) {
  if (!ok) throw ShapeError(what + ": " + shape_string(a) + " vs " + shape_string(b));
}

template <class F>
Var unary(Var a, Tensor out, F&& local_grad) {
  Tape& t = *a.tape();
  const std::size_t ia = a.id();
  return t.push(std::move(out), [ia, local_grad](Tape& tp, std::size_t self) {
    const Tensor& g = tp.grad(self);
    const Tensor& x = tp.value(ia);
    const Tensor& y = tp.value(self);
    Tensor& ga = tp.grad(ia);
    for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * local_grad(x[k], y[k]);
  });
}

}  // namespace

Var matmul(Var a, Var b) {
  Tape& t = same_tape(a, b);
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  require(A.cols() == B.rows(), "matmul", A, B);
  const std::size_t m = A.rows(), k = A.cols(), n = B.cols();
  Tensor out(m, n);
  kernels::gemm_nn(A.data(), B.data(), out.data(), m, k, n, false);
  const std::size_t ia = a.id(), ib = b.id();
  return t.push(std::move(out), [ia, ib, m, k, n](Tape& tp, std::size_t self) {
    const Tensor& g = tp.grad(self);
    // dA = g·Bᵀ, dB = Aᵀ·g
    kernels::gemm_nt(g.data(), tp.value(ib).data(), tp.grad(ia).data(), m, n, k, true);
    kernels::gemm_tn(tp.value(ia).data(), g.data(), tp.grad(ib).data(), k, m, n, true);
  });
}

Var matmul_nt(Var a, Var b) {
  Tape& t = same_tape(a, b);
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  require(A.cols() == B.cols(), "matmul_nt", A, B);
  const std::size_t m = A.rows(), k = A.cols(), n = B.rows();
  Tensor out(m, n);
  kernels::gemm_nt(A.data(), B.data(), out.data(), m, k, n, false);
  const std::size_t ia = a.id(), ib = b.id();
  return t.push(std::move(out), [ia, ib, m, k, n](Tape& tp, std::size_t self) {
    const Tensor& g = tp.grad(self);
    // dA = g·B, dB = gᵀ·A
    kernels::gemm_nn(g.data(), tp.value(ib).data(), tp.grad(ia).data(), m, n, k, true);
    kernels::gemm_tn(g.data(), tp.value(ia).data(), tp.grad(ib).data(), n, m, k, true);
  });
}

Var transpose(Var a) {
  Tape& t = *a.tape();
  const std::size_t ia = a.id();
  return t.push(a.value().transposed(), [ia](Tape& tp, std::size_t self) {
    const Tensor& g = tp.grad(self);
    Tensor& ga = tp.grad(ia);
    for (std::size_t r = 0; r < g.rows(); ++r)
      for (std::size_t c = 0; c < g.cols(); ++c) ga(c, r) += g(r, c);
  });
}

Var add(Var a, Var b) {
  Tape& t = same_tape(a, b);
  require(a.value().same_shape(b.value()), "add", a.value(), b.value());
  Tensor out = a.value();
  const Tensor& B = b.value();
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += B[k];
  const std::size_t ia = a.id(), ib = b.id();
  return t.push(std::move(out), [ia, ib](Tape& tp, std::size_t self) {
    const Tensor& g = tp.grad(self);
    Tensor& ga = tp.grad(ia);
    for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k];
    Tensor& gb = tp.grad(ib);
    for (std::size_t k = 0; k < g.size(); ++k) gb[k] += g[k];
  });
}

Var sub(Var a, Var b) {
  Tape& t = same_tape(a, b);
  require(a.value().same_shape(b.value()), "sub", a.value(), b.value());
  Tensor out = a.value();
  const Tensor& B = b.value();
  for (std::size_t k = 0; k < out.size(); ++k) out[k] -= B[k];
  const std::size_t ia = a.id(), ib = b.id();
  return t.push(std::move(out), [ia, ib](Tape& tp, std::size_t self) {
    const Tensor& g = tp.grad(self);
    Tensor& ga = tp.grad(ia);
    for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k];
    Tensor& gb = tp.grad(ib);
    for (std::size_t k = 0; k < g.size(); ++k) gb[k] -= g[k];
  });
}

Var mul(Var a, Var b) {
  Tape& t = same_tape(a, b);
  require(a.value().same_shape(b.value()), "mul", a.value(), b.value());
  Tensor out = a.value();
  const Tensor& B = b.value();
  for (std::size_t k = 0; k < out.size(); ++k) out[k] *= B[k];
  const std::size_t ia = a.id(), ib = b.id();
  return t.push(std::move(out), [ia, ib](Tape& tp, std::size_t self) {
    const Tensor& g = tp.grad(self);
    const Tensor& A = tp.value(ia);
    const Tensor& B = tp.value(ib);
    Tensor& ga = tp.grad(ia);
    for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * B[k];
    Tensor& gb = tp.grad(ib);
    for (std::size_t k = 0; k < g.size(); ++k) gb[k] += g[k] * A[k];
  });
}

Var scale(Var a, double s) {
  Tensor out = a.value();
  for (auto& v : out.values()) v *= s;
  return unary(a, std::move(out), [s](double, double) { return s; });
}

Var add_row(Var a, Var bias) {
  Tape& t = same_tape(a, bias);
  const Tensor& A = a.value();
  const Tensor& b = bias.value();
  require(b.rows() == 1 && b.cols() == A.cols(), "add_row", A, b);
  Tensor out = A;
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) += b[c];
  const std::size_t ia = a.id(), ib = bias.id();
  return t.push(std::move(out), [ia, ib](Tape& tp, std::size_t self) {
    const Tensor& g = tp.grad(self);
    Tensor& ga = tp.grad(ia);
    for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k];
    Tensor& gb = tp.grad(ib);
    for (std::size_t r = 0; r < g.rows(); ++r)
      for (std::size_t c = 0; c < g.cols(); ++c) gb[c] += g(r, c);
  });
}

Var relu(Var a) {
  Tensor out = a.value();
  for (auto& v : out.values()) v = v > 0.0 ? v : 0.0;
  return unary(a, std::move(out), [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var tanh(Var a) {
  Tensor out = a.value();
  for (auto& v : out.values()) v = std::tanh(v);
  return unary(a, std::move(out), [](double, double y) { return 1.0 - y * y; });
}

Var sigmoid(Var a) {
  Tensor out = a.value();
  for (auto& v : out.values()) v = 1.0 / (1.0 + std::exp(-v));
  return unary(a, std::move(out), [](double, double y) { return y * (1.0 - y); });
}

Var softmax_rows(Var a) {
  Tape& t = *a.tape();
  const std::size_t ia = a.id();
  return t.push(sgner::softmax_rows(a.value()), [ia](Tape& tp, std::size_t self) {
    const Tensor& g = tp.grad(self);
    const Tensor& y = tp.value(self);
    Tensor& ga = tp.grad(ia);
    for (std::size_t r = 0; r < y.rows(); ++r) {
      double dot = 0.0;
      for (std::size_t c = 0; c < y.cols(); ++c) dot += g(r, c) * y(r, c);
      for (std::size_t c = 0; c < y.cols(); ++c) ga(r, c) += y(r, c) * (g(r, c) - dot);
    }
  });
}

Var concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no parts");
  Tape& t = *parts.front().tape();
  const std::size_t rows = parts.front().rows();
  std::size_t cols = 0;
  for (const Var& p : parts) {
    if (p.tape() != &t) throw std::logic_error("operands on different tapes");
    require(p.rows() == rows, "concat_cols", parts.front().value(), p.value());
    cols += p.cols();
  }
  Tensor out(rows, cols);
  std::vector<std::size_t> ids, offsets;
  std::size_t off = 0;
  for (const Var& p : parts) {
    const Tensor& v = p.value();
    for (std::size_t r = 0; r < rows; ++r)
      std::copy_n(v.data() + r * v.cols(), v.cols(), out.data() + r * cols + off);
    ids.push_back(p.id());
    offsets.push_back(off);
    off += v.cols();
  }
  return t.push(std::move(out), [ids, offsets, rows, cols](Tape& tp, std::size_t self) {
    const Tensor& g = tp.grad(self);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      Tensor& gp = tp.grad(ids[i]);
      const std::size_t w = gp.cols();
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < w; ++c) gp(r, c) += g[r * cols + offsets[i] + c];
    }
  });
}

Var concat_rows(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no parts");
  Tape& t = *parts.front().tape();
  const std::size_t cols = parts.front().cols();
  std::size_t rows = 0;
  for (const Var& p : parts) {
    if (p.tape() != &t) throw std::logic_error("operands on different tapes");
    require(p.cols() == cols, "concat_rows", parts.front().value(), p.value());
    rows += p.rows();
  }
  Tensor out(rows, cols);
  std::vector<std::size_t> ids, offsets;
  std::size_t off = 0;
  for (const Var& p : parts) {
    const Tensor& v = p.value();
    std::copy(v.values().begin(), v.values().end(), out.data() + off * cols);
    ids.push_back(p.id());
    offsets.push_back(off);
    off += v.rows();
  }
  return t.push(std::move(out), [ids, offsets, cols](Tape& tp, std::size_t self) {
    const Tensor& g = tp.grad(self);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      Tensor& gp = tp.grad(ids[i]);
      const double* src = g.data() + offsets[i] * cols;
      for (std::size_t k = 0; k < gp.size(); ++k) gp[k] += src[k];
    }
  });
}

Var slice_cols(Var a, std::size_t begin, std::size_t count) {
  const Tensor& A = a.value();
  if (begin + count > A.cols() || count == 0)
    throw ShapeError("slice_cols: [" + std::to_string(begin) + ", +" + std::to_string(count) +
                     ") out of " + shape_string(A));
  Tensor out(A.rows(), count);
  for (std::size_t r = 0; r < A.rows(); ++r)
    std::copy_n(A.data() + r * A.cols() + begin, count, out.data() + r * count);
  const std::size_t ia = a.id();
  return a.tape()->push(std::move(out), [ia, begin, count](Tape& tp, std::size_t self) {
    const Tensor& g = tp.grad(self);
    Tensor& ga = tp.grad(ia);
    for (std::size_t r = 0; r < g.rows(); ++r)
      for (std::size_t c = 0; c < count; ++c) ga(r, begin + c) += g(r, c);
  });
}

Var gather_rows(Var a, const std::vector<std::size_t>& rows) {
  const Tensor& A = a.value();
  Tensor out(rows.size(), A.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= A.rows())
      throw ShapeError("gather_rows: row " + std::to_string(rows[i]) + " out of " +
                       shape_string(A));
    std::copy_n(A.data() + rows[i] * A.cols(), A.cols(), out.data() + i * A.cols());
  }
  const std::size_t ia = a.id();
  return a.tape()->push(std::move(out), [ia, rows](Tape& tp, std::size_t self) {
    const Tensor& g = tp.grad(self);
    Tensor& ga = tp.grad(ia);
    const std::size_t w = g.cols();
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t c = 0; c < w; ++c) ga(rows[i], c) += g(i, c);
  });
}

Var row(Var a, std::size_t r) { return gather_rows(a, {r}); }

Var sum(Var a) {
  const std::size_t ia = a.id();
  return a.tape()->push(Tensor::scalar(a.value().sum()), [ia](Tape& tp, std::size_t self) {
    const double g = tp.grad(self)[0];
    for (auto& v : tp.grad(ia).values()) v += g;
  });
}

Var cross_entropy(Var probabilities, const std::vector<std::size_t>& gold) {
  const Tensor& P = probabilities.value();
  if (gold.size() != P.rows())
    throw ShapeError("cross_entropy: " + std::to_string(gold.size()) + " labels for " +
                     shape_string(P));
  double loss = 0.0;
  for (std::size_t r = 0; r < P.rows(); ++r) {
    if (gold[r] >= P.cols())
      throw std::out_of_range("cross_entropy: gold class " + std::to_string(gold[r]) +
                              " >= " + std::to_string(P.cols()));
    loss -= std::log(P(r, gold[r]));
  }
  const std::size_t ip = probabilities.id();
  return probabilities.tape()->push(Tensor::scalar(loss), [ip, gold](Tape& tp, std::size_t self) {
    const double g = tp.grad(self)[0];
    const Tensor& P = tp.value(ip);
    Tensor& gp = tp.grad(ip);
    for (std::size_t r = 0; r < gold.size(); ++r) gp(r, gold[r]) -= g / P(r, gold[r]);
  });
}

Var softmax_cross_entropy(Var logits, const std::vector<std::size_t>& gold) {
  const Tensor& Z = logits.value();
  if (gold.size() != Z.rows())
    throw ShapeError("softmax_cross_entropy: " + std::to_string(gold.size()) + " labels for " +
                     shape_string(Z));
  Tensor probs = sgner::softmax_rows(Z);
  double loss = 0.0;
  for (std::size_t r = 0; r < Z.rows(); ++r) {
    if (gold[r] >= Z.cols())
      throw std::out_of_range("softmax_cross_entropy: gold class " + std::to_string(gold[r]) +
                              " >= " + std::to_string(Z.cols()));
    double mx = -INFINITY;
    for (std::size_t c = 0; c < Z.cols(); ++c) mx = std::max(mx, Z(r, c));
    double s = 0.0;
    for (std::size_t c = 0; c < Z.cols(); ++c) s += std::exp(Z(r, c) - mx);
    loss += mx + std::log(s) - Z(r, gold[r]);
  }
  const std::size_t iz = logits.id();
  return logits.tape()->push(
      Tensor::scalar(loss), [iz, gold, probs = std::move(probs)](Tape& tp, std::size_t self) {
        const double g = tp.grad(self)[0];
        Tensor& gz = tp.grad(iz);
        for (std::size_t r = 0; r < probs.rows(); ++r)
          for (std::size_t c = 0; c < probs.cols(); ++c)
            gz(r, c) += g * (probs(r, c) - (c == gold[r] ? 1.0 : 0.0));
      });
}

}  // namespace ops
}  // namespace sgner
