#pragma once

// Word representations and their syntax-enhanced refinement.
//
//   embed   : token lookup (OOV -> UNK), optionally concatenated with
//             precomputed per-token vectors
//   bilstm  : optional; concatenated forward/backward states, width d_h
//   aggcn   : attention-guided GCN over the dependency adjacency; block 1
//             uses the hard adjacency, later blocks per-head self-attention;
//             output H' = [H, H~ W2]

#include <string>
#include <unordered_map>
#include <vector>

#include "sgner/config.hpp"
#include "sgner/corpus.hpp"
#include "sgner/params.hpp"
#include "sgner/tape.hpp"

namespace sgner {

class Vocabulary {
 public:
  static constexpr std::size_t kUnk = 0;
  static constexpr const char* kUnkToken = "<unk>";

  Vocabulary();
  explicit Vocabulary(const std::vector<std::string>& words);

  std::size_t lookup(const std::string& word) const;
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Sorted vocabulary over corpus tokens plus any extra words.
Vocabulary build_vocabulary(const std::vector<AnnotatedSentence>& corpus,
                            const std::vector<std::string>& extra = {});

class EmbeddingTable {
 public:
  EmbeddingTable(ParameterStore& store, Vocabulary vocab, std::size_t dim, Rng& rng);

  /// Overwrites rows of words present in `vectors`; returns rows replaced.
  std::size_t load_pretrained(const WordVectors& vectors);
  Var lookup(Tape& tape, const std::vector<Token>& tokens) const;
  const Vocabulary& vocab() const { return vocab_; }
  std::size_t dim() const { return table_->value.cols(); }

 private:
  Vocabulary vocab_;
  Parameter* table_;
};

/// Symmetric 0/1 matrix with self-loops; no degree normalization.
Tensor build_adjacency(const AnnotatedSentence& s);

/// ReLU(A · X · W + b): X is N×d_in, W d_in×d_out, b 1×d_out.
Var gcn_layer(Var x, Var adjacency, Var weight, Var bias);

/// softmax(X Wq (X Wk)ᵀ / sqrt(d_head)) for one head's slice X (N×d_head).
Var attention_adjacency(Var head_input, Var wq, Var wk);

class BiLstm {
 public:
  BiLstm(ParameterStore& store, const std::string& prefix, std::size_t d_in, std::size_t d_out,
         Rng& rng);

  /// N×d_in -> N×d_out, row i = [forward_i, backward_i].
  Var forward(Tape& tape, Var input) const;
  std::size_t hidden() const { return hidden_; }

  struct Direction {
    Parameter* wx;  // d_in × 4h, gate order i, f, g, o
    Parameter* wh;  // h × 4h
    Parameter* b;   // 1 × 4h
  };
  const Direction& fwd() const { return fwd_; }
  const Direction& bwd() const { return bwd_; }

 private:
  Var run(Tape& tape, Var xw, const Direction& d, bool reverse) const;
  std::size_t hidden_;
  Direction fwd_, bwd_;
};

class Aggcn {
 public:
  Aggcn(ParameterStore& store, const ModelConfig& cfg, Rng& rng);

  /// H (N×d_h) -> H' (N×(d_h+d_f)).
  Var forward(Tape& tape, Var h, const Tensor& adjacency) const;
  /// The merged AGGCN output H~ (N×d_h) before reduction by W2.
  Var merged(Tape& tape, Var h, const Tensor& adjacency) const;

  std::size_t blocks() const { return blocks_.size(); }
  /// Blocks that derive their adjacency from self-attention (all but the first).
  std::size_t attention_blocks() const { return blocks_.empty() ? 0 : blocks_.size() - 1; }
  Parameter& reduce() const { return *reduce_; }

 private:
  struct Sublayer {
    Parameter* w;
    Parameter* b;
  };
  struct Head {
    std::vector<Sublayer> dense;
    Parameter* wq = nullptr;
    Parameter* wk = nullptr;
  };
  struct Block {
    std::vector<Head> heads;
    Parameter* merge;  // (n_head·d_h) × d_h
  };

  Var dense_stack(Var x, Var adjacency, const Head& head, Tape& tape) const;

  std::size_t d_h_, d_f_, n_head_;
  std::vector<Block> blocks_;
  Parameter* reduce_;  // d_h × d_f
};

}  // namespace sgner
