#pragma once

#include <string>
#include <vector>

#include "sgner/config.hpp"
#include "sgner/corpus.hpp"
#include "sgner/rng.hpp"
#include "sgner/tape.hpp"

namespace sgner::test {

inline Tensor random_tensor(std::size_t r, std::size_t c, Rng& rng, double scale = 1.0) {
  Tensor t(r, c);
  for (auto& v : t.values()) v = rng.uniform(-scale, scale);
  return t;
}

/// "The mitral valve leaflets are mildly thickened" with its discontinuous entity.
inline AnnotatedSentence mitral_sentence() {
  AnnotatedSentence s;
  s.tokens = make_tokens({"The", "mitral", "valve", "leaflets", "are", "mildly", "thickened"});
  s.dep_edges = {{3, 0, std::nullopt}, {3, 1, std::nullopt}, {3, 2, std::nullopt},
                 {6, 3, std::nullopt}, {6, 4, std::nullopt}, {6, 5, std::nullopt}};
  s.entities = {{"Disorder", {{1, 1}, {3, 3}, {6, 6}}}};
  return s;
}

/// "Pennsylvania radio station" with "Pennsylvania" nested inside.
inline AnnotatedSentence pennsylvania_sentence() {
  AnnotatedSentence s;
  s.tokens = make_tokens({"Pennsylvania", "radio", "station", "closed"});
  s.dep_edges = {{2, 0, std::nullopt}, {2, 1, std::nullopt}, {3, 2, std::nullopt}};
  s.entities = {{"GPE", {{0, 0}}}, {"ORG", {{0, 2}}}};
  return s;
}

/// Small model settings that keep the default structure.
inline ModelConfig small_model(std::vector<std::string> types = {"Disorder", "Drug"}) {
  ModelConfig m;
  m.d_emb = 6;
  m.d_h = 8;
  m.d_f = 4;
  m.mlp_hidden = 5;
  m.max_span_width = 4;
  m.entity_types = std::move(types);
  return m;
}

}  // namespace sgner::test
