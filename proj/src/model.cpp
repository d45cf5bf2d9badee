#include "sgner/model.hpp"

#include <algorithm>
#include <set>

namespace sgner {

Model::Model(ModelConfig cfg, Vocabulary vocab, std::size_t vector_dim, std::uint64_t seed)
    : cfg_(std::move(cfg)), vector_dim_(vector_dim), store_(std::make_unique<ParameterStore>()) {
  if (cfg_.entity_types.empty()) throw ConfigError({"model needs at least one entity type"});
  if (!cfg_.bilstm && cfg_.d_h != input_dim())
    throw ConfigError({"with bilstm off, d_h (" + std::to_string(cfg_.d_h) +
                       ") must equal d_emb + vector width (" + std::to_string(input_dim()) + ")"});
  Rng rng(seed, "init");
  embed_ = std::make_unique<EmbeddingTable>(*store_, std::move(vocab), cfg_.d_emb, rng);
  if (cfg_.bilstm) lstm_ = std::make_unique<BiLstm>(*store_, "lstm", input_dim(), cfg_.d_h, rng);
  if (!cfg_.no_gcn) gcn_ = std::make_unique<Aggcn>(*store_, cfg_, rng);
  scorer_ = std::make_unique<SpanScorer>(*store_, cfg_, span_classes(), rng);
}

std::size_t Model::type_index(const std::string& type) const {
  auto it = std::find(cfg_.entity_types.begin(), cfg_.entity_types.end(), type);
  if (it == cfg_.entity_types.end()) throw DataError("unknown entity type \"" + type + "\"");
  return static_cast<std::size_t>(it - cfg_.entity_types.begin()) + 1;
}

Var Model::embed(Tape& tape, const AnnotatedSentence& s) const {
  Var words = embed_->lookup(tape, s.tokens);
  const std::size_t got = s.vectors ? s.vectors->cols() : 0;
  if (got != vector_dim_)
    throw DataError("precomputed vector width " + std::to_string(got) + " != model's " +
                    std::to_string(vector_dim_));
  if (!s.vectors || vector_dim_ == 0) return words;
  return ops::concat_cols({words, tape.constant(*s.vectors)});
}

Var Model::word_reprs(Tape& tape, const AnnotatedSentence& s) const {
  Var h = embed(tape, s);
  return lstm_ ? lstm_->forward(tape, h) : h;
}

Var Model::hidden(Tape& tape, const AnnotatedSentence& s) const {
  Var h = word_reprs(tape, s);
  return gcn_ ? gcn_->forward(tape, h, build_adjacency(s)) : h;
}

SentenceForward Model::forward(Tape& tape, const AnnotatedSentence& s) const {
  SentenceForward fw;
  fw.spans = enumerate_spans(s.size(), cfg_.max_span_width);
  fw.hidden = hidden(tape, s);
  fw.reprs = scorer_->span_reprs(tape, fw.hidden, fw.spans);
  fw.span_logits = scorer_->span_logits(tape, fw.reprs);
  return fw;
}

Var Model::pair_logits(Tape& tape, const SentenceForward& fw,
                       const std::vector<std::pair<std::size_t, std::size_t>>& pairs) const {
  return scorer_->pair_logits(tape, fw.reprs, pairs);
}

std::vector<std::string> collect_entity_types(const std::vector<AnnotatedSentence>& corpus) {
  std::set<std::string> types;
  for (const auto& s : corpus)
    for (const auto& e : s.entities) types.insert(e.type);
  return {types.begin(), types.end()};
}

std::size_t corpus_vector_dim(const std::vector<AnnotatedSentence>& corpus) {
  std::optional<std::size_t> dim;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const std::size_t d = corpus[i].vectors ? corpus[i].vectors->cols() : 0;
    if (dim && *dim != d)
      throw DataError("sentence " + std::to_string(i) + " has vector width " + std::to_string(d) +
                      ", earlier sentences " + std::to_string(*dim));
    dim = d;
  }
  return dim.value_or(0);
}

}  // namespace sgner
