#pragma once

// Span representations s(i,j) = [h'_i, h'_j, w(width)] and the two
// classification heads: span -> {None, type_1..type_K} and fragment pair
// [s1, s1*s2, s2] -> {Succession, Overlapping, Other}.

#include <string>
#include <utility>
#include <vector>

#include "sgner/config.hpp"
#include "sgner/corpus.hpp"
#include "sgner/params.hpp"
#include "sgner/spans.hpp"
#include "sgner/tape.hpp"

namespace sgner {

inline constexpr std::size_t kWidthEmbeddingDim = 20;

/// Width of H' rows: d_h + d_f, or d_h when the GCN is bypassed.
std::size_t word_repr_dim(const ModelConfig& cfg);
/// d_s = 2·word_repr_dim + 20.
std::size_t span_repr_dim(const ModelConfig& cfg);

/// `layers` hidden ReLU layers of width `hidden`, then a linear output.
class Mlp {
 public:
  Mlp(ParameterStore& store, const std::string& prefix, std::size_t d_in, std::size_t hidden,
      std::size_t layers, std::size_t d_out, Rng& rng);

  Var forward(Tape& tape, Var x) const;
  std::size_t input_dim() const { return d_in_; }
  /// (weight, bias) per layer, output layer last.
  const std::vector<std::pair<Parameter*, Parameter*>>& layers() const { return layers_; }

 private:
  std::size_t d_in_;
  std::vector<std::pair<Parameter*, Parameter*>> layers_;
};

class SpanScorer {
 public:
  SpanScorer(ParameterStore& store, const ModelConfig& cfg, std::size_t n_span_classes,
             Rng& rng);

  /// One row per span: [h'_start, h'_end, width embedding].
  Var span_reprs(Tape& tape, Var hidden, const std::vector<Fragment>& spans) const;
  Var span_logits(Tape& tape, Var reprs) const { return span_head_.forward(tape, reprs); }
  /// Rows [s_a, s_a ⊙ s_b, s_b] for each (a, b) row pair of `reprs`.
  static Var pair_features(Var reprs, const std::vector<std::pair<std::size_t, std::size_t>>& pairs);
  Var pair_logits(Tape& tape, Var reprs,
                  const std::vector<std::pair<std::size_t, std::size_t>>& pairs) const;

  std::size_t max_width() const { return max_width_; }
  const Mlp& span_head() const { return span_head_; }
  const Mlp& pair_head() const { return pair_head_; }
  Parameter& width_table() const { return *widths_; }

 private:
  std::size_t max_width_;
  Parameter* widths_;
  Mlp span_head_;
  Mlp pair_head_;
};

/// Probabilities of one span: softmax of the span head.
Tensor classify_span(Tape& tape, const SpanScorer& scorer, Var repr);
/// Probabilities over {Succession, Overlapping, Other} for (s1, s2) in that order.
Tensor classify_pair(Tape& tape, const SpanScorer& scorer, Var s1, Var s2);

}  // namespace sgner
