#pragma once

// Reverse-mode automatic differentiation over dense 2-D tensors.
//
// A Tape records every operation as a node in creation order. Because a
// node's inputs always precede it, walking the node list backwards is a
// reverse topological order, and backward() visits each node exactly once.
// A tape supports a single backward pass; build a fresh tape per forward.

#include <cstddef>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sgner/tensor.hpp"

namespace sgner {

enum class ParamGroup { encoder, heads };

struct Parameter {
  Parameter(std::string name, Tensor value, ParamGroup group = ParamGroup::heads);

  std::string name;
  Tensor value;
  Tensor grad;
  ParamGroup group;

  void zero_grad() { grad.fill(0.0); }
};

class Tape;

/// Handle to a node on a tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;
  const Tensor& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  Tape* tape() const { return tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

class Tape {
 public:
  using Backward = std::function<void(Tape&, std::size_t self)>;

  /// With record_gradients=false no backward closures are kept; such a tape
  /// is for inference only and backward() throws.
  explicit Tape(bool record_gradients = true) : recording_(record_gradients) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  /// Leaf bound to a parameter; repeated calls return the same node. The
  /// parameter value is read in place and must not change while the tape lives.
  Var param(Parameter& p);

  /// Appends a node. `backward` reads grad(self) and accumulates into inputs.
  Var push(Tensor value, Backward backward);

  const Tensor& value(std::size_t id) const {
    const Node& n = nodes_[id];
    return n.external ? *n.external : n.value;
  }
  const Tensor& value(Var v) const { return value(v.id()); }
  /// Gradient buffer for a node, allocated (zeroed) on first access.
  Tensor& grad(std::size_t id);
  /// Gradient after backward(); zero tensor if the node received none.
  Tensor grad_of(Var v) const;
  bool has_grad(std::size_t id) const { return !nodes_[id].grad.values().empty(); }

  /// Seeds d(loss)/d(loss) = 1 and propagates; parameter leaves accumulate
  /// into Parameter::grad. Throws std::logic_error when called twice.
  void backward(Var loss);

  bool recording() const { return recording_; }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    const Tensor* external = nullptr;  // parameter leaves read in place
    Tensor grad;
    Backward backward;
    Parameter* param = nullptr;
  };
  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, std::size_t> param_nodes_;
  bool recording_;
  bool consumed_ = false;
};

// Differentiable operations. All inputs must live on the same tape.
namespace ops {

Var matmul(Var a, Var b);     ///< a·b
Var matmul_nt(Var a, Var b);  ///< a·bᵀ
Var transpose(Var a);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);  ///< elementwise
Var scale(Var a, double s);
/// a (m×n) + bias (1×n) broadcast over rows.
Var add_row(Var a, Var bias);
Var relu(Var a);
Var tanh(Var a);
Var sigmoid(Var a);
Var softmax_rows(Var a);
/// Concatenates along the last dimension; all parts share the row count.
Var concat_cols(const std::vector<Var>& parts);
/// Stacks along rows; all parts share the column count.
Var concat_rows(const std::vector<Var>& parts);
Var slice_cols(Var a, std::size_t begin, std::size_t count);
Var gather_rows(Var a, const std::vector<std::size_t>& rows);
Var row(Var a, std::size_t r);
Var sum(Var a);
/// Sum over rows of −log p(gold); `probabilities` rows are distributions.
Var cross_entropy(Var probabilities, const std::vector<std::size_t>& gold);
/// cross_entropy(softmax_rows(logits), gold) computed via log-sum-exp.
Var softmax_cross_entropy(Var logits, const std::vector<std::size_t>& gold);

}  // namespace ops

/// Forward-only helpers, shared by the tape ops and by tests.
Tensor softmax_rows(const Tensor& x);

}  // namespace sgner
