#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "sgner/gradcheck.hpp"
#include "sgner/kernels.hpp"
#include "sgner/optim.hpp"
#include "sgner/params.hpp"
#include "sgner/tape.hpp"

using namespace sgner;
using sgner::test::random_tensor;

namespace {

// Checks one op (reduced to a scalar via a fixed random projection) against
// central differences on its inputs.
double op_error(const std::vector<Tensor>& inputs,
                const std::function<Var(Tape&, const std::vector<Var>&)>& op) {
  std::vector<Parameter> params;
  params.reserve(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i)
    params.emplace_back("x" + std::to_string(i), inputs[i]);
  Tensor proj;
  auto loss = [&](Tape& t) {
    std::vector<Var> vs;
    for (auto& p : params) vs.push_back(t.param(p));
    Var y = op(t, vs);
    if (proj.size() == 0) {
      Rng r(99);
      proj = random_tensor(y.rows(), y.cols(), r);
    }
    return ops::sum(ops::mul(y, t.constant(proj)));
  };
  std::vector<Parameter*> ptrs;
  for (auto& p : params) ptrs.push_back(&p);
  return grad_check(loss, ptrs).max_rel_error;
}

}  // namespace

TEST_SUITE("tensor_core") {

TEST_CASE("tensor construction and shape checks") {
  Tensor t(2, 3, 1.5);
  CHECK(t.rows() == 2);
  CHECK(t.cols() == 3);
  CHECK(t.sum() == doctest::Approx(9.0));
  CHECK_THROWS_AS(Tensor(2, 2, std::vector<double>{1, 2, 3}), ShapeError);
  CHECK(Tensor::identity(3)(1, 1) == 1.0);
  CHECK(Tensor::identity(3)(1, 2) == 0.0);
  CHECK(shape_string(t) == "(2x3)");
  Tensor bad(1, 2);
  bad[1] = std::nan("");
  CHECK_FALSE(bad.all_finite());
}

TEST_CASE("identity matmul and concat shapes") {
  Rng rng(1);
  Tape tape;
  const Tensor m = random_tensor(3, 3, rng);
  Var y = ops::matmul(tape.constant(Tensor::identity(3)), tape.constant(m));
  CHECK(y.value() == m);
  Var c = ops::concat_cols({tape.constant(Tensor(2, 3)), tape.constant(Tensor(2, 5))});
  CHECK(c.rows() == 2);
  CHECK(c.cols() == 8);
  CHECK_THROWS_AS(ops::matmul(tape.constant(Tensor(2, 3)), tape.constant(Tensor(2, 3))),
                  ShapeError);
  CHECK_THROWS_AS(ops::concat_cols({tape.constant(Tensor(2, 3)), tape.constant(Tensor(3, 3))}),
                  ShapeError);
}

TEST_CASE("gradient of sum(AB) w.r.t. A is ones·Bᵀ") {
  Rng rng(2);
  Parameter a("a", random_tensor(3, 4, rng));
  Parameter b("b", random_tensor(4, 2, rng));
  Tape tape;
  tape.backward(ops::sum(ops::matmul(tape.param(a), tape.param(b))));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t p = 0; p < 4; ++p)
      CHECK(a.grad(i, p) == doctest::Approx(b.value(p, 0) + b.value(p, 1)).epsilon(1e-12));
}

TEST_CASE("every op passes a finite-difference check") {
  Rng rng(3);
  const double tol = 1e-6;
  auto r = [&](std::size_t m, std::size_t n) { return random_tensor(m, n, rng); };
  CHECK(op_error({r(3, 4), r(4, 2)}, [](Tape&, auto& v) { return ops::matmul(v[0], v[1]); }) < tol);
  CHECK(op_error({r(3, 4), r(2, 4)}, [](Tape&, auto& v) { return ops::matmul_nt(v[0], v[1]); }) < tol);
  CHECK(op_error({r(3, 4)}, [](Tape&, auto& v) { return ops::transpose(v[0]); }) < tol);
  CHECK(op_error({r(2, 3), r(2, 3)}, [](Tape&, auto& v) { return ops::add(v[0], v[1]); }) < tol);
  CHECK(op_error({r(2, 3), r(2, 3)}, [](Tape&, auto& v) { return ops::sub(v[0], v[1]); }) < tol);
  CHECK(op_error({r(2, 3), r(2, 3)}, [](Tape&, auto& v) { return ops::mul(v[0], v[1]); }) < tol);
  CHECK(op_error({r(2, 3)}, [](Tape&, auto& v) { return ops::scale(v[0], -2.5); }) < tol);
  CHECK(op_error({r(3, 4), r(1, 4)}, [](Tape&, auto& v) { return ops::add_row(v[0], v[1]); }) < tol);
  CHECK(op_error({r(3, 4)}, [](Tape&, auto& v) { return ops::tanh(v[0]); }) < tol);
  CHECK(op_error({r(3, 4)}, [](Tape&, auto& v) { return ops::sigmoid(v[0]); }) < tol);
  CHECK(op_error({r(3, 4)}, [](Tape&, auto& v) { return ops::softmax_rows(v[0]); }) < tol);
  CHECK(op_error({r(2, 3), r(2, 2)}, [](Tape&, auto& v) { return ops::concat_cols({v[0], v[1]}); }) < tol);
  CHECK(op_error({r(2, 3), r(1, 3)}, [](Tape&, auto& v) { return ops::concat_rows({v[0], v[1]}); }) < tol);
  CHECK(op_error({r(2, 5)}, [](Tape&, auto& v) { return ops::slice_cols(v[0], 1, 3); }) < tol);
  CHECK(op_error({r(4, 3)}, [](Tape&, auto& v) { return ops::gather_rows(v[0], {2, 0, 2}); }) < tol);
  CHECK(op_error({r(4, 3)}, [](Tape&, auto& v) { return ops::row(v[0], 3); }) < tol);
  CHECK(op_error({r(4, 3)}, [](Tape&, auto& v) { return ops::softmax_cross_entropy(v[0], {0, 2, 1, 1}); }) < tol);
  CHECK(op_error({r(3, 3)}, [](Tape&, auto& v) {
          return ops::cross_entropy(ops::softmax_rows(v[0]), {2, 0, 1});
        }) < tol);
  // Keep ReLU inputs away from the kink.
  Tensor away = r(3, 4);
  for (auto& x : away.values()) x += x >= 0 ? 0.1 : -0.1;
  CHECK(op_error({away}, [](Tape&, auto& v) { return ops::relu(v[0]); }) < tol);
}

TEST_CASE("softmax closed forms") {
  const Tensor u = softmax_rows(Tensor(1, 3, 0.0));
  for (std::size_t j = 0; j < 3; ++j) CHECK(u[j] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  const Tensor big = softmax_rows(Tensor(1, 2, std::vector<double>{1000.0, 0.0}));
  CHECK(big.all_finite());
  CHECK(big[0] == doctest::Approx(1.0));
  CHECK(big[1] < 1e-300);
  const Tensor logs = softmax_rows(Tensor::row({std::log(1.0), std::log(2.0), std::log(3.0)}));
  CHECK(logs[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(logs[1] == doctest::Approx(2.0 / 6.0).epsilon(1e-14));
  CHECK(logs[2] == doctest::Approx(3.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("softmax rows sum to one and ignore a per-row shift") {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 1 + static_cast<std::size_t>(rng.uniform_int(0, 5));
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform_int(0, 7));
    Tensor x = random_tensor(m, n, rng, 20.0);
    const Tensor p = softmax_rows(x);
    Tensor shifted = x;
    for (std::size_t i = 0; i < m; ++i) {
      const double c = rng.uniform(-50, 50);
      for (std::size_t j = 0; j < n; ++j) shifted(i, j) += c;
    }
    const Tensor q = softmax_rows(shifted);
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        s += p(i, j);
        CHECK(std::abs(p(i, j) - q(i, j)) < 1e-12);
      }
      CHECK(std::abs(s - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("cross entropy closed forms") {
  Tape tape;
  CHECK(ops::cross_entropy(tape.constant(Tensor(2, 3, 1.0 / 3.0)), {0, 2}).value()[0] ==
        doctest::Approx(2.0 * std::log(3.0)));
  CHECK(ops::cross_entropy(tape.constant(Tensor::row({0.0, 1.0})), {1}).value()[0] == 0.0);
  const Tensor p(2, 2, std::vector<double>{0.5, 0.5, 0.75, 0.25});
  CHECK(ops::cross_entropy(tape.constant(p), {0, 1}).value()[0] ==
        doctest::Approx(std::log(2.0) + std::log(4.0)));
  CHECK(ops::softmax_cross_entropy(tape.constant(Tensor(4, 3)), {0, 1, 2, 0}).value()[0] ==
        doctest::Approx(4.0 * std::log(3.0)));
  CHECK_THROWS_AS(ops::softmax_cross_entropy(tape.constant(Tensor(1, 3)), {3}), std::out_of_range);
  CHECK_THROWS_AS(ops::softmax_cross_entropy(tape.constant(Tensor(2, 3)), {0}), ShapeError);
}

TEST_CASE("backward is single-use") {
  Parameter a("a", Tensor::scalar(2.0));
  Tape tape;
  Var l = ops::mul(tape.param(a), tape.param(a));
  tape.backward(l);
  CHECK(a.grad[0] == 4.0);
  CHECK_THROWS_AS(tape.backward(l), std::logic_error);
  Tape inference(false);
  Var m = ops::scale(inference.param(a), 2.0);
  CHECK(m.value()[0] == 4.0);
  CHECK_THROWS_AS(inference.backward(m), std::logic_error);
}

TEST_CASE("parameters reused on one tape accumulate gradient") {
  Parameter a("a", Tensor::row({1.0, -2.0}));
  Tape tape;
  Var x = tape.param(a);
  Var y = tape.param(a);
  CHECK(x.id() == y.id());
  tape.backward(ops::sum(ops::add(ops::scale(x, 3.0), y)));
  CHECK(a.grad[0] == 4.0);
  CHECK(a.grad[1] == 4.0);
}

TEST_CASE("grad_check oracles") {
  Parameter theta("theta", Tensor::scalar(1.0));
  auto quad = [&](Tape& t) {
    Var v = t.param(theta);
    return ops::mul(v, v);
  };
  CHECK(grad_check(quad, {&theta}).max_rel_error < 1e-7);
  CHECK(theta.grad[0] == doctest::Approx(2.0));
  Parameter w("w", Tensor(2, 2, 0.3));
  auto constant = [&](Tape& t) {
    t.param(w);
    return t.constant(Tensor::scalar(7.0));
  };
  const GradCheckResult r = grad_check(constant, {&w});
  CHECK(std::abs(r.worst_fd) <= 1e-10);
  CHECK(r.max_rel_error == 0.0);
  CHECK(r.coordinates == 4);
}

TEST_CASE("grad_check names the worst parameter") {
  Parameter good("good", Tensor::scalar(0.7));
  Parameter bad("bad", Tensor::scalar(0.4));
  // A custom op with a deliberately wrong backward for `bad`.
  auto loss = [&](Tape& t) {
    Var g = t.param(good);
    Var b = t.param(bad);
    Var sq = ops::mul(g, g);
    Var wrong = t.push(Tensor::scalar(t.value(b)[0] * 3.0), [b](Tape& tp, std::size_t self) {
      tp.grad(b.id())[0] += 2.0 * tp.grad(self)[0];
    });
    return ops::add(sq, wrong);
  };
  const GradCheckResult r = grad_check(loss, {&good, &bad});
  CHECK(r.worst_param == "bad");
  CHECK(r.max_rel_error == doctest::Approx(0.2));
}

TEST_CASE("Adam closed-form steps") {
  Parameter p("p", Tensor::scalar(1.0), ParamGroup::heads);
  Adam adam({&p}, {.lr_encoder = 1e-3, .lr_heads = 1e-3});
  p.grad.fill(0.0);
  adam.step();
  CHECK(p.value[0] == 1.0);
  Parameter q("q", Tensor::scalar(1.0), ParamGroup::heads);
  Adam adam_q({&q}, {.lr_encoder = 1e-3, .lr_heads = 1e-3});
  q.grad.fill(1.0);
  adam_q.step();
  CHECK(1.0 - q.value[0] == doctest::Approx(1e-3).epsilon(1e-6));
  Parameter enc("enc", Tensor::scalar(0.0), ParamGroup::encoder);
  Parameter head("head", Tensor::scalar(0.0), ParamGroup::heads);
  Adam two({&enc, &head}, {.lr_encoder = 1e-3, .lr_heads = 5e-5});
  enc.grad.fill(0.3);
  head.grad.fill(0.3);
  two.step();
  CHECK(enc.value[0] / head.value[0] == doctest::Approx(20.0).epsilon(1e-6));
  CHECK(two.steps() == 1);
}

TEST_CASE("gradient clipping rescales to the global norm") {
  Parameter a("a", Tensor::row({0.0, 0.0}));
  Parameter b("b", Tensor::scalar(0.0));
  a.grad = Tensor::row({3.0, 4.0});
  b.grad = Tensor::scalar(12.0);
  CHECK(grad_norm({&a, &b}) == doctest::Approx(13.0));
  CHECK(clip_grad_norm({&a, &b}, 6.5) == doctest::Approx(13.0));
  CHECK(grad_norm({&a, &b}) == doctest::Approx(6.5));
  CHECK(a.grad[0] == doctest::Approx(1.5));
  CHECK(clip_grad_norm({&a, &b}, 100.0) == doctest::Approx(6.5));
  CHECK(a.grad[0] == doctest::Approx(1.5));
}

TEST_CASE("serial and OpenMP kernels agree bit for bit") {
  Rng rng(5);
  for (auto [m, k, n] : {std::tuple{1, 1, 1}, {3, 7, 5}, {64, 33, 17}, {130, 70, 90}}) {
    const auto M = static_cast<std::size_t>(m), K = static_cast<std::size_t>(k),
               N = static_cast<std::size_t>(n);
    Tensor a = random_tensor(M, K, rng), b = random_tensor(K, N, rng);
    Tensor bt = b.transposed(), at = a.transposed();
    a[0] = 0.0;  // exercise the zero skip
    at = a.transposed();
    Tensor c0(M, N), c1(M, N, 1.0), c2(M, N, 1.0);
    kernels::gemm_nn_serial(a.data(), b.data(), c0.data(), M, K, N, false);
    kernels::gemm_nn_omp(a.data(), b.data(), c1.data(), M, K, N, false);
    CHECK(c0 == c1);
    kernels::gemm_nt_serial(a.data(), bt.data(), c1.data(), M, K, N, false);
    kernels::gemm_nt_omp(a.data(), bt.data(), c2.data(), M, K, N, false);
    CHECK(c1 == c2);
    kernels::gemm_tn_serial(at.data(), b.data(), c1.data(), M, K, N, false);
    kernels::gemm_tn_omp(at.data(), b.data(), c2.data(), M, K, N, false);
    CHECK(c1 == c2);
    // Every layout computes the same product.
    for (std::size_t i = 0; i < c0.size(); ++i) CHECK(std::abs(c0[i] - c1[i]) < 1e-12);
    Tensor acc0(M, N, 2.0), acc1(M, N, 2.0);
    kernels::gemm_nn_serial(a.data(), b.data(), acc0.data(), M, K, N, true);
    kernels::gemm_nn(a.data(), b.data(), acc1.data(), M, K, N, true);
    CHECK(acc0 == acc1);
    CHECK(std::abs(acc0[0] - c0[0] - 2.0) < 1e-12);
  }
}

}  // TEST_SUITE
