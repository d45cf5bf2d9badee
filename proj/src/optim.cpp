#include "sgner/optim.hpp"

#include <cmath>

namespace sgner {

Adam::Adam(std::vector<Parameter*> params, AdamOptions opts)
    : params_(std::move(params)), opts_(opts) {
  for (const Parameter* p : params_) {
    m_.emplace_back(p->value.rows(), p->value.cols());
    v_.emplace_back(p->value.rows(), p->value.cols());
  }
}

void Adam::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(opts_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(opts_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Parameter& p = *params_[i];
    const double lr = p.group == ParamGroup::encoder ? opts_.lr_encoder : opts_.lr_heads;
    Tensor& m = m_[i];
    Tensor& v = v_[i];
    for (std::size_t k = 0; k < p.value.size(); ++k) {
      const double g = p.grad[k];
      m[k] = opts_.beta1 * m[k] + (1.0 - opts_.beta1) * g;
      v[k] = opts_.beta2 * v[k] + (1.0 - opts_.beta2) * g * g;
      const double mhat = m[k] / bc1;
      const double vhat = v[k] / bc2;
      p.value[k] -= lr * mhat / (std::sqrt(vhat) + opts_.eps);
    }
  }
}

void Adam::zero_grad() {
  for (Parameter* p : params_) p->zero_grad();
}

double grad_norm(const std::vector<Parameter*>& params) {
  double s = 0.0;
  for (const Parameter* p : params)
    for (double g : p->grad.values()) s += g * g;
  return std::sqrt(s);
}

double clip_grad_norm(const std::vector<Parameter*>& params, double max_norm) {
  const double norm = grad_norm(params);
  if (norm > max_norm) {
    const double f = max_norm / norm;
    for (Parameter* p : params)
      for (auto& g : p->grad.values()) g *= f;
  }
  return norm;
}

}  // namespace sgner
