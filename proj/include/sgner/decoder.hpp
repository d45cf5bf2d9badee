#pragma once

// Decoding: keep spans whose argmax class is an entity type, connect
// same-type fragment pairs whose argmax relation is Succession, and emit one
// entity per maximal clique of that graph (isolated fragments become
// single-fragment entities). Overlapping predictions are never consulted.

#include <string>
#include <utility>
#include <vector>

#include "sgner/cliques.hpp"
#include "sgner/corpus.hpp"
#include "sgner/model.hpp"

namespace sgner {

struct ScoredFragment {
  Fragment span;
  std::string entity_type;
  double confidence = 0.0;
  std::size_t row = 0;  ///< row in the sentence's span representation matrix
};

struct FragmentGraph {
  std::vector<ScoredFragment> nodes;
  UndirectedGraph edges;
};

struct EntityPrediction {
  std::string type;
  std::vector<Fragment> fragments;
  double confidence = 0.0;

  bool same_entity(const EntityPrediction& o) const {
    return type == o.type && fragments == o.fragments;
  }
};

/// Index of the largest value in a row; ties go to the lowest index.
std::size_t argmax_row(const Tensor& t, std::size_t row);

std::vector<ScoredFragment> predict_fragments(const SentenceForward& fw, const Model& model);
/// Evaluates every unordered fragment pair once, in canonical order;
/// `pair_probs`, if given, receives one probability row per pair.
UndirectedGraph predict_relations(Tape& tape, const SentenceForward& fw,
                                  const std::vector<ScoredFragment>& fragments,
                                  const Model& model, Tensor* pair_probs = nullptr);
/// Edge rule: Succession is the argmax of the pair's row and the types match.
/// Rows of `pair_scores` (logits or probabilities) follow predict_relations order.
UndirectedGraph relation_graph(const std::vector<ScoredFragment>& fragments,
                               const Tensor& pair_scores);

std::vector<std::vector<std::size_t>> find_complete_subgraphs(const FragmentGraph& g);
/// Cliques to entities: fragments sorted, confidence = mean fragment
/// confidence, duplicates removed.
std::vector<EntityPrediction> entities_from_graph(const FragmentGraph& g);

std::vector<EntityPrediction> decode(const AnnotatedSentence& s, const Model& model);
/// Decodes each sentence independently using up to `jobs` threads; output
/// order follows input order.
std::vector<std::vector<EntityPrediction>> decode_corpus(
    const std::vector<AnnotatedSentence>& corpus, const Model& model, int jobs = 1);

// Prediction JSONL: {"sentence_index": i, "entities": [{"type": t,
// "fragments": [[s, e], ...], "confidence": c}, ...]}
std::string predictions_to_json(std::size_t sentence_index,
                                const std::vector<EntityPrediction>& entities);
void write_predictions(std::ostream& out,
                       const std::vector<std::vector<EntityPrediction>>& predictions);
std::vector<std::vector<EntityPrediction>> read_predictions(std::istream& in);
std::vector<std::vector<EntityPrediction>> load_predictions(const std::string& path);

}  // namespace sgner
