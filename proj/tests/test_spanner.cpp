#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "sgner/model.hpp"
#include "sgner/params.hpp"
#include "sgner/spanner.hpp"
#include "sgner/spans.hpp"

using namespace sgner;
using sgner::test::random_tensor;

namespace {

void zero_mlp(const Mlp& mlp) {
  for (auto [w, b] : mlp.layers()) {
    w->value.fill(0.0);
    b->value.fill(0.0);
  }
}

}  // namespace

TEST_SUITE("spanner") {

TEST_CASE("span representation widths") {
  ModelConfig cfg;
  CHECK(span_repr_dim(cfg) == 860);
  cfg.no_gcn = true;
  CHECK(span_repr_dim(cfg) == 820);
  cfg.no_gcn = false;
  cfg.d_h = 768;
  cfg.d_f = 64;
  CHECK(span_repr_dim(cfg) == 1684);
}

TEST_CASE("span representation segments") {
  ModelConfig cfg = sgner::test::small_model();
  ParameterStore store;
  Rng rng(1);
  SpanScorer scorer(store, cfg, cfg.entity_types.size() + 1, rng);
  Tape tape;
  const Tensor h = random_tensor(6, 12, rng);
  const std::vector<Fragment> spans = {{2, 2}, {0, 1}, {3, 4}, {1, 4}};
  const Tensor r = scorer.span_reprs(tape, tape.constant(h), spans).value();
  REQUIRE(r.cols() == 44);
  for (std::size_t c = 0; c < 12; ++c) {
    CHECK(r(0, c) == r(0, 12 + c));
    CHECK(r(0, c) == h(2, c));
    CHECK(r(3, c) == h(1, c));
    CHECK(r(3, 12 + c) == h(4, c));
  }
  for (std::size_t c = 24; c < 44; ++c) {
    CHECK(r(1, c) == r(2, c));
    CHECK(r(1, c) == scorer.width_table().value(1, c - 24));
    CHECK(r(3, c) == scorer.width_table().value(3, c - 24));
  }
  CHECK_THROWS(scorer.span_reprs(tape, tape.constant(h), {{0, 4}}));
}

TEST_CASE("heads with zero weights are uniform") {
  ModelConfig cfg = sgner::test::small_model();
  ParameterStore store;
  Rng rng(2);
  SpanScorer scorer(store, cfg, 3, rng);
  zero_mlp(scorer.span_head());
  zero_mlp(scorer.pair_head());
  Tape tape;
  const Tensor reprs = random_tensor(2, 44, rng);
  const Tensor one = classify_span(tape, scorer, ops::row(tape.constant(reprs), 0));
  for (double v : one.values()) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  const Tensor span_p = softmax_rows(scorer.span_logits(tape, tape.constant(reprs)).value());
  for (double v : span_p.values()) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  Var s1 = ops::row(tape.constant(reprs), 0), s2 = ops::row(tape.constant(reprs), 1);
  const Tensor pair_p = classify_pair(tape, scorer, s1, s2);
  for (double v : pair_p.values()) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("head probabilities are distributions") {
  ModelConfig cfg = sgner::test::small_model();
  cfg.mlp_layers = 2;
  ParameterStore store;
  Rng rng(3);
  SpanScorer scorer(store, cfg, 3, rng);
  CHECK(scorer.span_head().layers().size() == 3);
  Tape tape;
  for (int trial = 0; trial < 10; ++trial) {
    const Tensor reprs = random_tensor(5, 44, rng, 3.0);
    const Tensor p = softmax_rows(scorer.span_logits(tape, tape.constant(reprs)).value());
    for (std::size_t i = 0; i < 5; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < 3; ++j) s += p(i, j);
      CHECK(std::abs(s - 1.0) < 1e-9);
    }
    const Tensor q = classify_pair(tape, scorer, tape.constant(random_tensor(1, 44, rng)),
                                   tape.constant(random_tensor(1, 44, rng)));
    CHECK(std::abs(q.sum() - 1.0) < 1e-9);
  }
}

TEST_CASE("pair features") {
  Rng rng(4);
  Tape tape;
  const Tensor reprs = random_tensor(3, 4, rng);
  Tensor with_ones = reprs;
  for (std::size_t c = 0; c < 4; ++c) with_ones(2, c) = 1.0;
  const Tensor f = SpanScorer::pair_features(tape.constant(with_ones), {{0, 2}, {1, 0}}).value();
  REQUIRE(f.cols() == 12);
  for (std::size_t c = 0; c < 4; ++c) {
    CHECK(f(0, c) == reprs(0, c));
    CHECK(f(0, 4 + c) == reprs(0, c));
    CHECK(f(0, 8 + c) == 1.0);
    CHECK(f(1, 4 + c) == reprs(1, c) * reprs(0, c));
  }
}

TEST_CASE("pair classification depends on argument order") {
  ModelConfig cfg = sgner::test::small_model();
  ParameterStore store;
  Rng rng(5);
  SpanScorer scorer(store, cfg, 3, rng);
  Tape tape;
  Var a = tape.constant(random_tensor(1, 44, rng));
  Var b = tape.constant(random_tensor(1, 44, rng));
  const Tensor ab = classify_pair(tape, scorer, a, b);
  const Tensor ba = classify_pair(tape, scorer, b, a);
  double diff = 0.0;
  for (std::size_t k = 0; k < 3; ++k) diff += std::abs(ab[k] - ba[k]);
  CHECK(diff > 1e-6);
}

TEST_CASE("model forward enumerates spans within the width cap") {
  ModelConfig cfg = sgner::test::small_model();
  const AnnotatedSentence s = sgner::test::mitral_sentence();
  Model m(cfg, build_vocabulary({s}), 0, 1);
  Tape tape;
  const SentenceForward fw = m.forward(tape, s);
  CHECK(fw.spans == enumerate_spans(7, 4));
  CHECK(fw.reprs.rows() == span_count(7, 4));
  CHECK(fw.span_logits.cols() == 3);
  CHECK(fw.hidden.cols() == 12);
  CHECK(m.type_index("Drug") == 2);
  CHECK(m.type_name(1) == "Disorder");
}

}  // TEST_SUITE
