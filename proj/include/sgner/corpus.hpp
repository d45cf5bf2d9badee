#pragma once

// Sentences annotated with (possibly discontinuous, possibly overlapping)
// entities and a dependency graph, plus the gold span and pair labels the
// model is trained on.

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sgner/tensor.hpp"

namespace sgner {

/// Malformed input data. `line` is 1-based, 0 when not tied to a line.
class DataError : public std::runtime_error {
 public:
  DataError(const std::string& what, std::size_t line = 0);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct Token {
  std::size_t index = 0;
  std::string text;
};

struct DependencyEdge {
  std::size_t head = 0;
  std::size_t dependent = 0;
  std::optional<std::string> label;
};

/// Closed token interval [start, end].
struct Fragment {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t width() const { return end - start + 1; }
  bool intersects(const Fragment& o) const { return start <= o.end && o.start <= end; }
  auto operator<=>(const Fragment&) const = default;
};

struct Entity {
  std::string type;
  std::vector<Fragment> fragments;

  bool operator==(const Entity&) const = default;
};

struct AnnotatedSentence {
  std::vector<Token> tokens;
  std::vector<DependencyEdge> dep_edges;
  std::vector<Entity> entities;
  std::optional<Tensor> vectors;

  std::size_t size() const { return tokens.size(); }
};

enum class Relation : std::size_t { succession = 0, overlapping = 1, other = 2 };
inline constexpr std::size_t kRelationCount = 3;
const char* relation_name(Relation r);

using FragmentPair = std::pair<Fragment, Fragment>;

struct SpanLabels {
  /// One entry per enumerated span; nullopt means "not a fragment".
  std::map<Fragment, std::optional<std::string>> labels;
  /// Gold fragments wider than max_width, hence unreachable.
  std::size_t excluded_gold = 0;
};

struct GoldLabels {
  SpanLabels spans;
  /// Keyed (first, second) with first < second.
  std::map<FragmentPair, Relation> pairs;
};

/// All invariant violations of a sentence; empty when valid.
std::vector<std::string> validate(const AnnotatedSentence& s);

/// Builds a sentence from whitespace-free tokens, assigning indices.
std::vector<Token> make_tokens(const std::vector<std::string>& words);

/// Distinct gold fragments of a sentence in (start, end) order.
std::vector<Fragment> gold_fragments(const AnnotatedSentence& s);

SpanLabels derive_span_labels(const AnnotatedSentence& s, std::size_t max_width);
std::map<FragmentPair, Relation> derive_pair_labels(const AnnotatedSentence& s);
GoldLabels derive_gold_labels(const AnnotatedSentence& s, std::size_t max_width);

// JSONL corpus format, one sentence per line:
//   {"tokens": [...], "dep_edges": [[head, dependent], ...],
//    "entities": [{"type": t, "fragments": [[start, end], ...]}, ...],
//    "vectors": [[...] x N]}            (vectors optional)
AnnotatedSentence parse_sentence(const std::string& json_line, std::size_t line_no = 0);
std::string sentence_to_json(const AnnotatedSentence& s);
std::vector<AnnotatedSentence> read_corpus(std::istream& in);
std::vector<AnnotatedSentence> load_corpus(const std::string& path);
void write_corpus(std::ostream& out, const std::vector<AnnotatedSentence>& corpus);
void save_corpus(const std::string& path, const std::vector<AnnotatedSentence>& corpus);

/// Plain-text embeddings: first line "V D", then V lines "word f1 ... fD".
struct WordVectors {
  std::size_t dim = 0;
  std::unordered_map<std::string, std::vector<double>> vectors;
};
WordVectors read_word_vectors(std::istream& in);
WordVectors load_word_vectors(const std::string& path);

}  // namespace sgner
