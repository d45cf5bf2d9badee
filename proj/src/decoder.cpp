#include "sgner/decoder.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

namespace sgner {

std::size_t argmax_row(const Tensor& t, std::size_t row) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < t.cols(); ++c)
    if (t(row, c) > t(row, best)) best = c;
  return best;
}

std::vector<ScoredFragment> predict_fragments(const SentenceForward& fw, const Model& model) {
  const Tensor probs = softmax_rows(fw.span_logits.value());
  std::vector<ScoredFragment> out;
  for (std::size_t r = 0; r < fw.spans.size(); ++r) {
    const std::size_t cls = argmax_row(probs, r);
    if (cls == 0) continue;
    out.push_back({fw.spans[r], model.type_name(cls), probs(r, cls), r});
  }
  return out;
}

UndirectedGraph relation_graph(const std::vector<ScoredFragment>& fragments,
                               const Tensor& pair_scores) {
  UndirectedGraph g(fragments.size());
  std::size_t row = 0;
  for (std::size_t a = 0; a < fragments.size(); ++a)
    for (std::size_t b = a + 1; b < fragments.size(); ++b, ++row) {
      if (fragments[a].entity_type != fragments[b].entity_type) continue;
      if (argmax_row(pair_scores, row) == static_cast<std::size_t>(Relation::succession))
        g.add_edge(a, b);
    }
  return g;
}

UndirectedGraph predict_relations(Tape& tape, const SentenceForward& fw,
                                  const std::vector<ScoredFragment>& fragments,
                                  const Model& model, Tensor* pair_probs) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < fragments.size(); ++a)
    for (std::size_t b = a + 1; b < fragments.size(); ++b)
      pairs.emplace_back(fragments[a].row, fragments[b].row);
  Tensor logits(0, kRelationCount);
  if (!pairs.empty()) logits = model.pair_logits(tape, fw, pairs).value();
  // Argmax on logits: softmax is monotone, and the logits do not depend on
  // the summation order of a normalizer.
  UndirectedGraph g = relation_graph(fragments, logits);
  if (pair_probs) *pair_probs = logits.rows() ? softmax_rows(logits) : logits;
  return g;
}

std::vector<std::vector<std::size_t>> find_complete_subgraphs(const FragmentGraph& g) {
  return maximal_cliques(g.edges);
}

std::vector<EntityPrediction> entities_from_graph(const FragmentGraph& g) {
  std::vector<EntityPrediction> out;
  for (const auto& clique : find_complete_subgraphs(g)) {
    EntityPrediction e;
    e.type = g.nodes[clique.front()].entity_type;
    double conf = 0.0;
    for (std::size_t v : clique) {
      e.fragments.push_back(g.nodes[v].span);
      conf += g.nodes[v].confidence;
    }
    std::sort(e.fragments.begin(), e.fragments.end());
    e.confidence = conf / static_cast<double>(clique.size());
    const bool dup = std::any_of(out.begin(), out.end(),
                                 [&](const EntityPrediction& o) { return o.same_entity(e); });
    if (!dup) out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end(), [](const EntityPrediction& a, const EntityPrediction& b) {
    if (a.fragments != b.fragments) return a.fragments < b.fragments;
    return a.type < b.type;
  });
  return out;
}

std::vector<EntityPrediction> decode(const AnnotatedSentence& s, const Model& model) {
  Tape tape(false);
  const SentenceForward fw = model.forward(tape, s);
  FragmentGraph g;
  g.nodes = predict_fragments(fw, model);
  g.edges = predict_relations(tape, fw, g.nodes, model);
  return entities_from_graph(g);
}

std::vector<std::vector<EntityPrediction>> decode_corpus(
    const std::vector<AnnotatedSentence>& corpus, const Model& model, int jobs) {
  std::vector<std::vector<EntityPrediction>> out(corpus.size());
  const auto n = static_cast<long>(corpus.size());
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, jobs)) if (jobs > 1)
  for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = decode(corpus[static_cast<std::size_t>(i)], model);
  return out;
}

std::string predictions_to_json(std::size_t sentence_index,
                                const std::vector<EntityPrediction>& entities) {
  nlohmann::ordered_json j;
  j["sentence_index"] = sentence_index;
  j["entities"] = nlohmann::ordered_json::array();
  for (const auto& e : entities) {
    nlohmann::ordered_json frags = nlohmann::ordered_json::array();
    for (const auto& f : e.fragments) frags.push_back({f.start, f.end});
    // fixed precision keeps files byte-stable and readable
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", e.confidence);
    j["entities"].push_back(
        {{"type", e.type}, {"fragments", frags}, {"confidence", std::strtod(buf, nullptr)}});
  }
  return j.dump();
}

void write_predictions(std::ostream& out,
                       const std::vector<std::vector<EntityPrediction>>& predictions) {
  for (std::size_t i = 0; i < predictions.size(); ++i)
    out << predictions_to_json(i, predictions[i]) << '\n';
}

std::vector<std::vector<EntityPrediction>> read_predictions(std::istream& in) {
  std::vector<std::vector<EntityPrediction>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      const auto idx = j.at("sentence_index").get<std::size_t>();
      if (idx != out.size())
        throw DataError("sentence_index " + std::to_string(idx) + " out of order (expected " +
                        std::to_string(out.size()) + ")", line_no);
      std::vector<EntityPrediction> ents;
      for (const auto& e : j.at("entities")) {
        EntityPrediction p;
        p.type = e.at("type").get<std::string>();
        for (const auto& f : e.at("fragments"))
          p.fragments.push_back({f.at(0).get<std::size_t>(), f.at(1).get<std::size_t>()});
        std::sort(p.fragments.begin(), p.fragments.end());
        p.confidence = e.value("confidence", 0.0);
        ents.push_back(std::move(p));
      }
      out.push_back(std::move(ents));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("malformed prediction record: ") + e.what(), line_no);
    }
  }
  return out;
}

std::vector<std::vector<EntityPrediction>> load_predictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open predictions file " + path);
  try {
    return read_predictions(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

}  // namespace sgner
