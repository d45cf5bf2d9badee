#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sgner/corpus.hpp"

namespace sgner {

/// Shape of a synthetic corpus. Each sentence is built from 1..max_constructions
/// entity constructions separated by filler words:
///   regular       one contiguous entity
///   nested        an entity inside another of a different type (overlapped)
///   discontinuous one entity of 2-3 fragments with filler gaps
///   shared        two discontinuous entities sharing their first fragment
/// p_overlap and p_discont are the per-construction probabilities of the
/// nested and discontinuous (plain or shared) kinds.
struct SynthSpec {
  std::size_t sentences = 50;
  double p_overlap = 0.3;
  double p_discont = 0.5;
  double p_shared = 0.35;  ///< share of discontinuous constructions that are "shared"
  std::size_t min_len = 8;
  std::size_t max_len = 14;
  std::size_t max_constructions = 2;
  std::vector<std::string> types = {"Disorder", "Drug"};
  std::size_t vector_dim = 0;  ///< attach per-word vectors of this width when > 0
};

/// Deterministic given (spec, seed). Throws std::invalid_argument when the
/// spec cannot be satisfied.
std::vector<AnnotatedSentence> synthesize_corpus(const SynthSpec& spec, std::uint64_t seed);

/// True when the maximal cliques of the gold Succession graph are exactly the
/// gold entities, i.e. perfect head predictions decode back to the gold set.
bool gold_decodable(const AnnotatedSentence& s);

}  // namespace sgner
