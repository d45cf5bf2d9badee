#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sgner/tape.hpp"

namespace sgner {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double worst_fd = 0.0;
  double worst_ad = 0.0;
  std::size_t coordinates = 0;
};

/// Builds the loss on the given tape; must be deterministic.
using LossClosure = std::function<Var(Tape&)>;

/// Compares tape gradients with central finite differences over every
/// coordinate of every parameter. Relative error per coordinate is
/// |fd − ad| / max(1e-8, |fd| + |ad|).
GradCheckResult grad_check(const LossClosure& loss, const std::vector<Parameter*>& params,
                           double epsilon = 1e-5);

}  // namespace sgner
