#pragma once

#include <vector>

#include "sgner/tape.hpp"

namespace sgner {

struct AdamOptions {
  double lr_encoder = 1e-3;
  double lr_heads = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias correction; the learning rate is chosen per ParamGroup.
class Adam {
 public:
  Adam(std::vector<Parameter*> params, AdamOptions opts);

  /// Applies one update from the current Parameter::grad values.
  void step();
  void zero_grad();
  long steps() const { return t_; }

 private:
  std::vector<Parameter*> params_;
  std::vector<Tensor> m_, v_;
  AdamOptions opts_;
  long t_ = 0;
};

/// Global L2 norm over all gradients.
double grad_norm(const std::vector<Parameter*>& params);
/// Rescales gradients so the global norm is at most max_norm. Returns the
/// norm before clipping.
double clip_grad_norm(const std::vector<Parameter*>& params, double max_norm);

}  // namespace sgner
