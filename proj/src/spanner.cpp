#include "sgner/spanner.hpp"

#include <algorithm>

namespace sgner {

std::vector<Fragment> enumerate_spans(std::size_t n, std::size_t max_width) {
  std::vector<Fragment> out;
  out.reserve(span_count(n, max_width));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n && j - i + 1 <= max_width; ++j) out.push_back({i, j});
  return out;
}

std::size_t span_count(std::size_t n, std::size_t max_width) {
  const std::size_t w = std::min(n, max_width);
  // Σ_{k=1..w} (n − k + 1)
  return w * (n + 1) - w * (w + 1) / 2;
}

std::size_t word_repr_dim(const ModelConfig& cfg) {
  return cfg.no_gcn ? cfg.d_h : cfg.d_h + cfg.d_f;
}

std::size_t span_repr_dim(const ModelConfig& cfg) {
  return 2 * word_repr_dim(cfg) + kWidthEmbeddingDim;
}

Mlp::Mlp(ParameterStore& store, const std::string& prefix, std::size_t d_in, std::size_t hidden,
         std::size_t layers, std::size_t d_out, Rng& rng)
    : d_in_(d_in) {
  std::size_t width = d_in;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::string p = prefix + ".l" + std::to_string(l);
    layers_.emplace_back(&store.add(p + ".w", glorot(width, hidden, rng), ParamGroup::heads),
                         &store.add(p + ".b", Tensor(1, hidden), ParamGroup::heads));
    width = hidden;
  }
  layers_.emplace_back(&store.add(prefix + ".out.w", glorot(width, d_out, rng), ParamGroup::heads),
                       &store.add(prefix + ".out.b", Tensor(1, d_out), ParamGroup::heads));
}

Var Mlp::forward(Tape& tape, Var x) const {
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    x = ops::add_row(ops::matmul(x, tape.param(*layers_[l].first)), tape.param(*layers_[l].second));
    if (l + 1 < layers_.size()) x = ops::relu(x);
  }
  return x;
}

SpanScorer::SpanScorer(ParameterStore& store, const ModelConfig& cfg,
                       std::size_t n_span_classes, Rng& rng)
    : max_width_(cfg.max_span_width),
      widths_(&store.add("span.width",
                         normal_table(cfg.max_span_width, kWidthEmbeddingDim, 0.02, rng),
                         ParamGroup::heads)),
      span_head_(store, "span_head", span_repr_dim(cfg), cfg.mlp_hidden, cfg.mlp_layers,
                 n_span_classes, rng),
      pair_head_(store, "pair_head", 3 * span_repr_dim(cfg), cfg.mlp_hidden, cfg.mlp_layers,
                 kRelationCount, rng) {}

Var SpanScorer::span_reprs(Tape& tape, Var hidden, const std::vector<Fragment>& spans) const {
  std::vector<std::size_t> starts, ends, widths;
  starts.reserve(spans.size());
  ends.reserve(spans.size());
  widths.reserve(spans.size());
  for (const auto& f : spans) {
    if (f.end >= hidden.rows() || f.start > f.end)
      throw ShapeError("span_reprs: span out of bounds");
    if (f.width() > max_width_)
      throw ShapeError("span_reprs: width " + std::to_string(f.width()) + " exceeds max_span_width " +
                       std::to_string(max_width_));
    starts.push_back(f.start);
    ends.push_back(f.end);
    widths.push_back(f.width() - 1);
  }
  return ops::concat_cols({ops::gather_rows(hidden, starts), ops::gather_rows(hidden, ends),
                           ops::gather_rows(tape.param(*widths_), widths)});
}

Var SpanScorer::pair_features(Var reprs,
                              const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  std::vector<std::size_t> first, second;
  for (auto [a, b] : pairs) {
    first.push_back(a);
    second.push_back(b);
  }
  Var s1 = ops::gather_rows(reprs, first);
  Var s2 = ops::gather_rows(reprs, second);
  return ops::concat_cols({s1, ops::mul(s1, s2), s2});
}

Var SpanScorer::pair_logits(Tape& tape, Var reprs,
                            const std::vector<std::pair<std::size_t, std::size_t>>& pairs) const {
  return pair_head_.forward(tape, pair_features(reprs, pairs));
}

Tensor classify_span(Tape& tape, const SpanScorer& scorer, Var repr) {
  return softmax_rows(scorer.span_logits(tape, repr).value());
}

Tensor classify_pair(Tape& tape, const SpanScorer& scorer, Var s1, Var s2) {
  Var both = ops::concat_rows({s1, s2});
  return softmax_rows(scorer.pair_logits(tape, both, {{0, 1}}).value());
}

}  // namespace sgner
