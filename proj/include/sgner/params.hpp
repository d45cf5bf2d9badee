#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "sgner/rng.hpp"
#include "sgner/tape.hpp"

namespace sgner {

/// Owns named parameters at stable addresses, in registration order.
class ParameterStore {
 public:
  Parameter& add(const std::string& name, Tensor value, ParamGroup group) {
    if (index_.count(name)) throw std::logic_error("duplicate parameter name " + name);
    index_.emplace(name, params_.size());
    params_.push_back(std::make_unique<Parameter>(name, std::move(value), group));
    return *params_.back();
  }

  Parameter* find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : params_[it->second].get();
  }

  Parameter& at(const std::string& name) const {
    if (Parameter* p = find(name)) return *p;
    throw std::out_of_range("no parameter named " + name);
  }

  std::vector<Parameter*> all() const {
    std::vector<Parameter*> out;
    for (const auto& p : params_) out.push_back(p.get());
    return out;
  }

  std::size_t size() const { return params_.size(); }

  std::size_t scalar_count() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += p->value.size();
    return n;
  }

  void zero_grad() {
    for (auto& p : params_) p->zero_grad();
  }

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Glorot-uniform weight of shape fan_in × fan_out.
inline Tensor glorot(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor t(fan_in, fan_out);
  for (auto& v : t.values()) v = rng.uniform(-limit, limit);
  return t;
}

inline Tensor normal_table(std::size_t rows, std::size_t cols, double stddev, Rng& rng) {
  Tensor t(rows, cols);
  for (auto& v : t.values()) v = rng.normal(0.0, stddev);
  return t;
}

}  // namespace sgner
