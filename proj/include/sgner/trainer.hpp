#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "sgner/config.hpp"
#include "sgner/corpus.hpp"
#include "sgner/model.hpp"

namespace sgner {

struct LossWeights {
  double alpha = 1.0;
  double beta = 1.0;
};

/// Per-sentence training targets.
struct Supervision {
  std::vector<Fragment> spans;          ///< spans carrying a span target
  std::vector<std::size_t> span_rows;   ///< row of each span in enumerate_spans order
  std::vector<std::size_t> span_classes;
  /// Unordered gold-fragment pairs (teacher forcing), as span rows, canonical order.
  std::vector<std::pair<std::size_t, std::size_t>> pair_rows;
  std::vector<FragmentPair> pairs;
  std::vector<std::size_t> pair_classes;
};

/// Span targets over all enumerated spans (or a kept subset when
/// negative_keep < 1, sampled from `rng`), pair targets over gold fragments
/// reachable within max_span_width. With no_overlap_relation, Overlapping
/// pair targets become Other.
Supervision assemble_supervision(const AnnotatedSentence& s, const GoldLabels& gold,
                                 const Model& model, const TrainConfig& cfg,
                                 Rng* rng = nullptr);

/// α·span CE + β·pair CE for one sentence (sum reduction).
Var sentence_loss(Tape& tape, const AnnotatedSentence& s, const Supervision& sup,
                  const Model& model, const LossWeights& w);

/// Mean of sentence losses over the batch.
Var compute_loss(Tape& tape, const std::vector<const AnnotatedSentence*>& batch,
                 const std::vector<const Supervision*>& targets, const Model& model,
                 const LossWeights& w);

struct EpochLog {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double dev_p = 0.0, dev_r = 0.0, dev_f1 = 0.0;
  double best_so_far = 0.0;
};

std::string epoch_csv_header();
std::string epoch_csv_line(const EpochLog& e);

struct TrainResult {
  RunConfig config;  ///< with entity types resolved
  std::unique_ptr<Model> model;  ///< parameters of the best dev epoch
  std::vector<EpochLog> log;
  double best_f1 = 0.0;
  std::size_t best_epoch = 0;
};

struct TrainOptions {
  int jobs = 1;
  /// Called after every epoch (for logging); may be empty.
  std::function<void(const EpochLog&)> on_epoch;
};

/// Builds a model for `corpus` (vocabulary, entity types, vector width,
/// optional pretrained embeddings) without training it.
std::unique_ptr<Model> build_model(const std::vector<AnnotatedSentence>& corpus, RunConfig& cfg);

/// Adam training with per-epoch dev evaluation and early stopping on dev F1.
TrainResult train(const std::vector<AnnotatedSentence>& corpus,
                  const std::vector<AnnotatedSentence>& dev, RunConfig cfg,
                  const TrainOptions& opts = {});

}  // namespace sgner
