#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sgner/config.hpp"
#include "sgner/corpus.hpp"
#include "sgner/encoder.hpp"
#include "sgner/params.hpp"
#include "sgner/spanner.hpp"

namespace sgner {

/// Everything the heads need from one sentence's forward pass.
struct SentenceForward {
  std::vector<Fragment> spans;  ///< enumerate_spans order
  Var hidden;                   ///< H' (N × word_repr_dim)
  Var reprs;                    ///< one span representation per row of `spans`
  Var span_logits;              ///< spans × (K + 1); column 0 is None
};

/// The full network. Forward passes only read parameters, so a frozen model
/// may be shared by concurrent forward passes on separate tapes.
class Model {
 public:
  /// `vector_dim` is the width of precomputed per-token vectors (0 if none).
  Model(ModelConfig cfg, Vocabulary vocab, std::size_t vector_dim, std::uint64_t seed);
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  const ModelConfig& config() const { return cfg_; }
  const std::vector<std::string>& entity_types() const { return cfg_.entity_types; }
  std::size_t span_classes() const { return cfg_.entity_types.size() + 1; }
  /// 1-based class index of a type; 0 is None.
  std::size_t type_index(const std::string& type) const;
  const std::string& type_name(std::size_t cls) const { return cfg_.entity_types.at(cls - 1); }
  std::size_t vector_dim() const { return vector_dim_; }
  std::size_t input_dim() const { return cfg_.d_emb + vector_dim_; }

  ParameterStore& params() const { return *store_; }
  const EmbeddingTable& embeddings() const { return *embed_; }
  EmbeddingTable& embeddings() { return *embed_; }
  const BiLstm* bilstm() const { return lstm_.get(); }
  const Aggcn* aggcn() const { return gcn_.get(); }
  const SpanScorer& scorer() const { return *scorer_; }

  /// Row i = embedding(token_i) ++ precomputed vector i.
  Var embed(Tape& tape, const AnnotatedSentence& s) const;
  /// H: embed followed by the BiLSTM when enabled.
  Var word_reprs(Tape& tape, const AnnotatedSentence& s) const;
  /// H' = aggcn(H), or H when no_gcn.
  Var hidden(Tape& tape, const AnnotatedSentence& s) const;
  SentenceForward forward(Tape& tape, const AnnotatedSentence& s) const;
  Var pair_logits(Tape& tape, const SentenceForward& fw,
                  const std::vector<std::pair<std::size_t, std::size_t>>& pairs) const;

 private:
  ModelConfig cfg_;
  std::size_t vector_dim_;
  std::unique_ptr<ParameterStore> store_;
  std::unique_ptr<EmbeddingTable> embed_;
  std::unique_ptr<BiLstm> lstm_;
  std::unique_ptr<Aggcn> gcn_;
  std::unique_ptr<SpanScorer> scorer_;
};

/// Sorted entity types over a corpus.
std::vector<std::string> collect_entity_types(const std::vector<AnnotatedSentence>& corpus);

/// Width of precomputed vectors in a corpus; 0 when absent. Throws DataError
/// when sentences disagree.
std::size_t corpus_vector_dim(const std::vector<AnnotatedSentence>& corpus);

}  // namespace sgner
