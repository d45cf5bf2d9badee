#include "sgner/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace sgner {

namespace {

double eval_loss(const LossClosure& loss) {
  Tape tape(false);
  return loss(tape).value()[0];
}

}  // namespace

GradCheckResult grad_check(const LossClosure& loss, const std::vector<Parameter*>& params,
                           double epsilon) {
  for (Parameter* p : params) p->zero_grad();
  {
    Tape tape;
    Var l = loss(tape);
    tape.backward(l);
  }
  GradCheckResult res;
  for (Parameter* p : params) {
    for (std::size_t k = 0; k < p->value.size(); ++k) {
      const double orig = p->value[k];
      p->value[k] = orig + epsilon;
      const double up = eval_loss(loss);
      p->value[k] = orig - epsilon;
      const double down = eval_loss(loss);
      p->value[k] = orig;
      const double fd = (up - down) / (2.0 * epsilon);
      const double ad = p->grad[k];
      const double err = std::abs(fd - ad) / std::max(1e-8, std::abs(fd) + std::abs(ad));
      ++res.coordinates;
      if (err > res.max_rel_error || res.worst_param.empty()) {
        if (err >= res.max_rel_error) {
          res.max_rel_error = err;
          res.worst_param = p->name;
          res.worst_index = k;
          res.worst_fd = fd;
          res.worst_ad = ad;
        }
      }
    }
  }
  return res;
}

}  // namespace sgner
