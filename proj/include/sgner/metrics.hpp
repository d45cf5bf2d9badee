#pragma once

// Exact-match entity scoring: a prediction is correct only if its type and
// its complete fragment set equal those of a gold entity. Scores are also
// reported for the cumulative category groups r, r+o, r+d and r+o+d.

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "sgner/corpus.hpp"
#include "sgner/decoder.hpp"

namespace sgner {

enum class Category { regular, overlapped, discontinuous };
const char* category_name(Category c);

/// Discontinuous if more than one fragment; otherwise overlapped if it shares
/// a token with another entity of `sentence_entities`; otherwise regular.
Category category_of(const Entity& entity, const std::vector<Entity>& sentence_entities);

bool match_entity(const EntityPrediction& pred, const Entity& gold);

struct Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  double precision() const;
  double recall() const;
  double f1() const;
  std::size_t predicted() const { return tp + fp; }
  std::size_t gold() const { return tp + fn; }
  Counts& operator+=(const Counts& o);
};

struct GroupReport {
  std::string name;  ///< "r", "r+o", "r+d", "r+o+d"
  std::vector<Category> members;
  Counts counts;
};

struct EvalReport {
  Counts overall;
  std::vector<GroupReport> groups;
  /// Gold entities per category: regular, overlapped, discontinuous.
  std::array<std::size_t, 3> gold_by_category{};

  std::string to_json() const;
  std::string to_table() const;
};

/// Throws DataError when the lists have different lengths.
EvalReport evaluate(const std::vector<std::vector<EntityPrediction>>& preds,
                    const std::vector<AnnotatedSentence>& golds);

}  // namespace sgner
