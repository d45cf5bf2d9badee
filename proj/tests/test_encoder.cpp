#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "sgner/encoder.hpp"
#include "sgner/gradcheck.hpp"
#include "sgner/model.hpp"
#include "sgner/params.hpp"
#include "sgner/spanner.hpp"
#include "sgner/trainer.hpp"

using namespace sgner;
using sgner::test::mitral_sentence;
using sgner::test::random_tensor;

TEST_SUITE("encoder") {

TEST_CASE("embedding shapes and OOV handling") {
  AnnotatedSentence s = mitral_sentence();
  ModelConfig cfg = sgner::test::small_model();
  cfg.d_emb = 50;
  cfg.bilstm = false;
  cfg.no_gcn = true;
  cfg.d_h = 50;
  Model m(cfg, build_vocabulary({s}), 0, 1);
  Tape tape;
  Var h = m.word_reprs(tape, s);
  CHECK(h.rows() == 7);
  CHECK(h.cols() == 50);

  AnnotatedSentence oov = s;
  oov.tokens[0].text = "zzz";
  oov.tokens[1].text = "qqq";
  Var e = m.embed(tape, oov);
  for (std::size_t c = 0; c < 50; ++c) CHECK(e.value()(0, c) == e.value()(1, c));
  CHECK(m.embeddings().vocab().lookup("zzz") == Vocabulary::kUnk);

  ModelConfig wide = cfg;
  wide.d_h = 150;
  AnnotatedSentence with_vec = s;
  with_vec.vectors = Tensor(7, 100, 0.25);
  Model mv(wide, build_vocabulary({s}), 100, 1);
  CHECK(mv.embed(tape, with_vec).cols() == 150);
  CHECK(mv.embed(tape, with_vec).value()(3, 120) == 0.25);
  CHECK_THROWS_AS(mv.embed(tape, s), DataError);
}

TEST_CASE("vocabulary and pretrained rows") {
  const Vocabulary v = build_vocabulary({mitral_sentence()}, {"aorta"});
  CHECK(v.words().front() == Vocabulary::kUnkToken);
  CHECK(v.size() == 9);
  CHECK(std::is_sorted(v.words().begin() + 1, v.words().end()));
  ParameterStore store;
  Rng rng(1);
  EmbeddingTable table(store, v, 2, rng);
  WordVectors wv{2, {{"aorta", {1.0, 2.0}}, {"missing", {0.0, 0.0}}}};
  CHECK(table.load_pretrained(wv) == 1);
  Tape tape;
  Var row = table.lookup(tape, make_tokens({"aorta"}));
  CHECK(row.value()[1] == 2.0);
  CHECK_THROWS_AS(table.load_pretrained(WordVectors{3, {}}), DataError);
}

TEST_CASE("BiLSTM shapes and direction symmetry") {
  ParameterStore store;
  Rng rng(2);
  BiLstm lstm(store, "lstm", 3, 8, rng);
  CHECK(lstm.hidden() == 4);
  // Give both directions the same weights so direction is the only difference.
  lstm.bwd().wx->value = lstm.fwd().wx->value;
  lstm.bwd().wh->value = lstm.fwd().wh->value;
  lstm.bwd().b->value = random_tensor(1, 16, rng);
  lstm.fwd().b->value = lstm.bwd().b->value;
  const Tensor x = random_tensor(5, 3, rng);
  Tensor rev(5, 3);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t c = 0; c < 3; ++c) rev(i, c) = x(4 - i, c);
  Tape tape;
  const Tensor a = lstm.forward(tape, tape.constant(x)).value();
  const Tensor b = lstm.forward(tape, tape.constant(rev)).value();
  CHECK(a.cols() == 8);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t c = 0; c < 4; ++c) {
      CHECK(b(i, c) == doctest::Approx(a(4 - i, 4 + c)).epsilon(1e-14));
      CHECK(b(i, 4 + c) == doctest::Approx(a(4 - i, c)).epsilon(1e-14));
    }
  const Tensor one = lstm.forward(tape, tape.constant(random_tensor(1, 3, rng))).value();
  CHECK(one.rows() == 1);
  CHECK(one.cols() == 8);
  CHECK_THROWS_AS(BiLstm(store, "odd", 3, 7, rng), ConfigError);
}

TEST_CASE("BiLSTM with zero weights is a function of the bias only") {
  ParameterStore store;
  Rng rng(3);
  BiLstm lstm(store, "lstm", 3, 4, rng);
  for (auto* d : {&lstm.fwd(), &lstm.bwd()}) {
    d->wx->value.fill(0.0);
    d->wh->value.fill(0.0);
  }
  Tape tape;
  const Tensor out = lstm.forward(tape, tape.constant(random_tensor(4, 3, rng))).value();
  // Gates i=f=g=o with zero bias: c_1 = σ(0)·tanh(0) = 0, so h stays 0.
  for (double v : out.values()) CHECK(v == 0.0);
  // Nonzero bias, first step: h = σ(b_o)·tanh(σ(b_i)·tanh(b_g)).
  lstm.fwd().b->value = Tensor(1, 8, std::vector<double>{0.5, -0.1, 0.2, 0.3, -0.4, 0.8, 1.1, 0.7});
  const Tensor o2 = lstm.forward(tape, tape.constant(Tensor(1, 3))).value();
  auto sig = [](double z) { return 1.0 / (1.0 + std::exp(-z)); };
  for (std::size_t u = 0; u < 2; ++u) {
    const Tensor& b = lstm.fwd().b->value;
    const double expect = sig(b[6 + u]) * std::tanh(sig(b[u]) * std::tanh(b[4 + u]));
    CHECK(o2(0, u) == doctest::Approx(expect).epsilon(1e-14));
  }
}

TEST_CASE("dependency adjacency") {
  AnnotatedSentence two;
  two.tokens = make_tokens({"a", "b"});
  two.dep_edges = {{1, 0, std::nullopt}};
  CHECK(build_adjacency(two) == Tensor(2, 2, 1.0));
  AnnotatedSentence three;
  three.tokens = make_tokens({"a", "b", "c"});
  CHECK(build_adjacency(three) == Tensor::identity(3));
  AnnotatedSentence tree;
  tree.tokens = make_tokens({"a", "b", "c", "d", "e"});
  tree.dep_edges = {{1, 0, std::nullopt}, {1, 2, std::nullopt}, {2, 3, std::nullopt}, {3, 4, std::nullopt}};
  const Tensor a = build_adjacency(tree);
  CHECK(a.sum() == 5 + 2 * 4);
  CHECK(a == a.transposed());
}

TEST_CASE("GCN layer closed forms") {
  Rng rng(4);
  Tape tape;
  const Tensor h = random_tensor(3, 4, rng);
  const Tensor w = random_tensor(4, 2, rng);
  const Tensor b = random_tensor(1, 2, rng);
  const Tensor id = gcn_layer(tape.constant(h), tape.constant(Tensor::identity(3)),
                              tape.constant(w), tape.constant(b)).value();
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      double z = b[j];
      for (std::size_t p = 0; p < 4; ++p) z += h(i, p) * w(p, j);
      CHECK(id(i, j) == doctest::Approx(std::max(0.0, z)).epsilon(1e-14));
    }
  Tensor nonneg = h;
  for (auto& v : nonneg.values()) v = std::abs(v);
  const Tensor sums = gcn_layer(tape.constant(nonneg), tape.constant(Tensor(3, 3, 1.0)),
                                tape.constant(Tensor::identity(4)), tape.constant(Tensor(1, 4))).value();
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t c = 0; c < 4; ++c)
      CHECK(sums(i, c) == doctest::Approx(nonneg(0, c) + nonneg(1, c) + nonneg(2, c)));
  const Tensor zero = gcn_layer(tape.constant(Tensor(3, 4)), tape.constant(Tensor(3, 3, 1.0)),
                                tape.constant(w), tape.constant(b)).value();
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK(zero(i, j) == std::max(0.0, b[j]));
}

TEST_CASE("attention adjacency") {
  Rng rng(5);
  Tape tape;
  const Tensor zero = attention_adjacency(tape.constant(random_tensor(4, 3, rng)),
                                          tape.constant(Tensor(3, 3)), tape.constant(Tensor(3, 3))).value();
  for (double v : zero.values()) CHECK(v == doctest::Approx(0.25).epsilon(1e-15));
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor h = random_tensor(5, 3, rng, 2.0);
    const Tensor wq = random_tensor(3, 3, rng), wk = random_tensor(3, 3, rng);
    const Tensor a = attention_adjacency(tape.constant(h), tape.constant(wq), tape.constant(wk)).value();
    for (std::size_t i = 0; i < 5; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < 5; ++j) s += a(i, j);
      CHECK(std::abs(s - 1.0) < 1e-9);
    }
    // Logits recomputed by hand: scaling H by c scales them by c².
    const double c = 1.7;
    Tensor hc = h;
    for (auto& v : hc.values()) v *= c;
    const Tensor ac = attention_adjacency(tape.constant(hc), tape.constant(wq), tape.constant(wk)).value();
    Tensor logits(5, 5);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 5; ++j) {
        double dot = 0.0;
        for (std::size_t u = 0; u < 3; ++u) {
          double q = 0.0, k = 0.0;
          for (std::size_t p = 0; p < 3; ++p) {
            q += h(i, p) * wq(p, u);
            k += h(j, p) * wk(p, u);
          }
          dot += q * k;
        }
        logits(i, j) = c * c * dot / std::sqrt(3.0);
      }
    const Tensor expect = softmax_rows(logits);
    for (std::size_t k = 0; k < expect.size(); ++k) CHECK(std::abs(ac[k] - expect[k]) < 1e-12);
  }
}

TEST_CASE("AGGCN output widths") {
  ModelConfig cfg;
  ParameterStore store;
  Rng rng(6);
  Aggcn gcn(store, cfg, rng);
  CHECK(gcn.blocks() == 2);
  CHECK(gcn.attention_blocks() == 1);
  CHECK(word_repr_dim(cfg) == 420);
  CHECK(span_repr_dim(cfg) == 860);
  ModelConfig genia;
  genia.d_h = 768;
  genia.d_f = 64;
  CHECK(span_repr_dim(genia) == 1684);

  ModelConfig small = sgner::test::small_model();
  small.gcn_blocks = 1;
  ParameterStore s1;
  Aggcn one(s1, small, rng);
  CHECK(one.attention_blocks() == 0);
  for (Parameter* p : s1.all()) {
    CHECK_FALSE(p->name.ends_with(".wq"));
    CHECK_FALSE(p->name.ends_with(".wk"));
  }
  Tape tape;
  const AnnotatedSentence s = mitral_sentence();
  Var out = one.forward(tape, tape.constant(random_tensor(7, 8, rng)), build_adjacency(s));
  CHECK(out.rows() == 7);
  CHECK(out.cols() == 12);
  ModelConfig bad = small;
  bad.n_head = 3;
  ParameterStore s2;
  CHECK_THROWS_AS(Aggcn(s2, bad, rng), ConfigError);
}

TEST_CASE("AGGCN passes H through in H' = [H, H~ W2]") {
  ModelConfig small = sgner::test::small_model();
  ParameterStore store;
  Rng rng(7);
  Aggcn gcn(store, small, rng);
  Tape tape;
  const Tensor h = random_tensor(7, 8, rng);
  const Tensor adj = build_adjacency(mitral_sentence());
  const Tensor out = gcn.forward(tape, tape.constant(h), adj).value();
  const Tensor tilde = gcn.merged(tape, tape.constant(h), adj).value();
  for (std::size_t i = 0; i < 7; ++i) {
    for (std::size_t c = 0; c < 8; ++c) CHECK(out(i, c) == h(i, c));
    for (std::size_t f = 0; f < 4; ++f) {
      double z = 0.0;
      for (std::size_t c = 0; c < 8; ++c) z += tilde(i, c) * gcn.reduce().value(c, f);
      CHECK(out(i, 8 + f) == doctest::Approx(z).epsilon(1e-13));
    }
  }
}

TEST_CASE("full-pipeline gradient check on a five-token sentence") {
  AnnotatedSentence s;
  s.tokens = make_tokens({"Tone", "was", "increased", "and", "decreased"});
  s.dep_edges = {{2, 0, std::nullopt}, {2, 1, std::nullopt}, {2, 3, std::nullopt}, {2, 4, std::nullopt}};
  s.entities = {{"Disorder", {{0, 0}, {2, 2}}}, {"Disorder", {{0, 0}, {4, 4}}}, {"Drug", {{0, 1}}}};
  ModelConfig cfg = sgner::test::small_model();
  Model model(cfg, build_vocabulary({s}), 0, 3);
  Rng rng(3, "gradcheck");
  for (Parameter* p : model.params().all()) {
    const bool table = p->name == "embed.words" || p->name == "span.width";
    if (table || p->name.ends_with(".b"))
      for (auto& v : p->value.values()) v = rng.normal(0.0, table ? 1.0 : 0.1);
  }
  const GoldLabels gold = derive_gold_labels(s, cfg.max_span_width);
  const Supervision sup = assemble_supervision(s, gold, model, TrainConfig{});
  const auto r = grad_check([&](Tape& t) { return sentence_loss(t, s, sup, model, {}); },
                            model.params().all());
  CHECK(r.max_rel_error < 1e-4);
  CHECK(r.coordinates == model.params().scalar_count());
}

}  // TEST_SUITE
