#include "sgner/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sgner/spans.hpp"

namespace sgner {

using nlohmann::json;
using nlohmann::ordered_json;

DataError::DataError(const std::string& what, std::size_t line)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
      line_(line) {}

const char* relation_name(Relation r) {
  switch (r) {
    case Relation::succession: return "Succession";
    case Relation::overlapping: return "Overlapping";
    case Relation::other: return "Other";
  }
  return "?";
}

std::vector<Token> make_tokens(const std::vector<std::string>& words) {
  std::vector<Token> out;
  out.reserve(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) out.push_back({i, words[i]});
  return out;
}

namespace {

std::string frag_str(const Fragment& f) {
  return "(" + std::to_string(f.start) + "," + std::to_string(f.end) + ")";
}

}  // namespace

std::vector<std::string> validate(const AnnotatedSentence& s) {
  std::vector<std::string> errors;
  const std::size_t n = s.tokens.size();
  if (n == 0) errors.push_back("sentence has no tokens");
  for (std::size_t i = 0; i < n; ++i) {
    if (s.tokens[i].index != i)
      errors.push_back("token " + std::to_string(i) + " has index " +
                       std::to_string(s.tokens[i].index));
    if (s.tokens[i].text.empty()) errors.push_back("token " + std::to_string(i) + " is empty");
  }
  for (const auto& e : s.dep_edges) {
    if (e.head >= n || e.dependent >= n)
      errors.push_back("dependency edge (" + std::to_string(e.head) + "," +
                       std::to_string(e.dependent) + ") out of bounds for " +
                       std::to_string(n) + " tokens");
    else if (e.head == e.dependent)
      errors.push_back("dependency edge is a self-loop at " + std::to_string(e.head));
  }
  std::map<Fragment, std::string> span_type;
  for (std::size_t ei = 0; ei < s.entities.size(); ++ei) {
    const Entity& ent = s.entities[ei];
    const std::string tag = "entity " + std::to_string(ei);
    if (ent.type.empty()) errors.push_back(tag + " has an empty type");
    if (ent.fragments.empty()) errors.push_back(tag + " has no fragments");
    for (std::size_t k = 0; k < ent.fragments.size(); ++k) {
      const Fragment& f = ent.fragments[k];
      if (f.start > f.end || f.end >= n) {
        errors.push_back(tag + " fragment " + frag_str(f) + " out of bounds for " +
                         std::to_string(n) + " tokens");
        continue;
      }
      if (k > 0) {
        const Fragment& prev = ent.fragments[k - 1];
        if (!(prev < f)) errors.push_back(tag + " fragments not sorted at " + frag_str(f));
        if (prev.intersects(f))
          errors.push_back(tag + " fragments " + frag_str(prev) + " and " + frag_str(f) +
                           " overlap");
      }
      auto [it, inserted] = span_type.emplace(f, ent.type);
      if (!inserted && it->second != ent.type)
        errors.push_back("span " + frag_str(f) + " labeled both " + it->second + " and " +
                         ent.type);
    }
    // non-adjacent overlaps (sorting already reported)
    for (std::size_t a = 0; a < ent.fragments.size(); ++a)
      for (std::size_t b = a + 2; b < ent.fragments.size(); ++b)
        if (ent.fragments[a].intersects(ent.fragments[b]))
          errors.push_back(tag + " fragments " + frag_str(ent.fragments[a]) + " and " +
                           frag_str(ent.fragments[b]) + " overlap");
    for (std::size_t ej = 0; ej < ei; ++ej)
      if (s.entities[ej] == ent)
        errors.push_back(tag + " duplicates entity " + std::to_string(ej));
  }
  if (s.vectors && s.vectors->rows() != n)
    errors.push_back("vectors have " + std::to_string(s.vectors->rows()) + " rows for " +
                     std::to_string(n) + " tokens");
  return errors;
}

std::vector<Fragment> gold_fragments(const AnnotatedSentence& s) {
  std::set<Fragment> all;
  for (const auto& e : s.entities) all.insert(e.fragments.begin(), e.fragments.end());
  return {all.begin(), all.end()};
}

SpanLabels derive_span_labels(const AnnotatedSentence& s, std::size_t max_width) {
  SpanLabels out;
  for (const Fragment& f : enumerate_spans(s.size(), max_width)) out.labels.emplace(f, std::nullopt);
  for (const Fragment& f : gold_fragments(s)) {
    auto it = out.labels.find(f);
    if (it == out.labels.end()) {
      ++out.excluded_gold;
      continue;
    }
    for (const auto& e : s.entities)
      if (std::find(e.fragments.begin(), e.fragments.end(), f) != e.fragments.end()) {
        it->second = e.type;
        break;
      }
  }
  return out;
}

std::map<FragmentPair, Relation> derive_pair_labels(const AnnotatedSentence& s) {
  const auto frags = gold_fragments(s);
  std::map<FragmentPair, Relation> out;
  for (std::size_t a = 0; a < frags.size(); ++a) {
    for (std::size_t b = a + 1; b < frags.size(); ++b) {
      const Fragment& fa = frags[a];
      const Fragment& fb = frags[b];
      bool same_entity = false;
      for (const auto& e : s.entities) {
        const auto has = [&](const Fragment& f) {
          return std::find(e.fragments.begin(), e.fragments.end(), f) != e.fragments.end();
        };
        if (has(fa) && has(fb)) {
          same_entity = true;
          break;
        }
      }
      Relation r = Relation::other;
      if (same_entity)
        r = Relation::succession;
      else if (fa.intersects(fb))
        r = Relation::overlapping;
      out.emplace(FragmentPair{fa, fb}, r);
    }
  }
  return out;
}

GoldLabels derive_gold_labels(const AnnotatedSentence& s, std::size_t max_width) {
  return {derive_span_labels(s, max_width), derive_pair_labels(s)};
}

namespace {

std::size_t as_index(const json& v, const char* what, std::size_t line) {
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw DataError(std::string(what) + " must be a non-negative integer", line);
  return v.get<std::size_t>();
}

}  // namespace

AnnotatedSentence parse_sentence(const std::string& json_line, std::size_t line_no) {
  json j;
  try {
    j = json::parse(json_line);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed JSON: ") + e.what(), line_no);
  }
  if (!j.is_object()) throw DataError("record is not a JSON object", line_no);
  AnnotatedSentence s;
  try {
    if (!j.contains("tokens") || !j["tokens"].is_array())
      throw DataError("missing \"tokens\" array", line_no);
    std::vector<std::string> words;
    for (const auto& t : j["tokens"]) {
      if (!t.is_string()) throw DataError("tokens must be strings", line_no);
      words.push_back(t.get<std::string>());
    }
    s.tokens = make_tokens(words);
    if (j.contains("dep_edges")) {
      for (const auto& e : j["dep_edges"]) {
        if (!e.is_array() || e.size() < 2 || e.size() > 3)
          throw DataError("dep_edges entries must be [head, dependent(, label)]", line_no);
        DependencyEdge edge{as_index(e[0], "edge head", line_no),
                            as_index(e[1], "edge dependent", line_no), std::nullopt};
        if (e.size() == 3) edge.label = e[2].get<std::string>();
        s.dep_edges.push_back(std::move(edge));
      }
    }
    if (j.contains("entities")) {
      for (const auto& e : j["entities"]) {
        if (!e.is_object() || !e.contains("type") || !e.contains("fragments"))
          throw DataError("entities need \"type\" and \"fragments\"", line_no);
        Entity ent;
        ent.type = e["type"].get<std::string>();
        for (const auto& f : e["fragments"]) {
          if (!f.is_array() || f.size() != 2)
            throw DataError("fragments must be [start, end]", line_no);
          ent.fragments.push_back(
              {as_index(f[0], "fragment start", line_no), as_index(f[1], "fragment end", line_no)});
        }
        s.entities.push_back(std::move(ent));
      }
    }
    if (j.contains("vectors") && !j["vectors"].is_null()) {
      const auto& rows = j["vectors"];
      const std::size_t n = rows.size();
      const std::size_t d = n ? rows[0].size() : 0;
      Tensor v(n, d);
      for (std::size_t r = 0; r < n; ++r) {
        if (rows[r].size() != d) throw DataError("ragged \"vectors\" matrix", line_no);
        for (std::size_t c = 0; c < d; ++c) v(r, c) = rows[r][c].get<double>();
      }
      s.vectors = std::move(v);
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("bad field: ") + e.what(), line_no);
  }
  if (auto errs = validate(s); !errs.empty()) throw DataError(errs.front(), line_no);
  return s;
}

std::string sentence_to_json(const AnnotatedSentence& s) {
  ordered_json j;
  j["tokens"] = ordered_json::array();
  for (const auto& t : s.tokens) j["tokens"].push_back(t.text);
  j["dep_edges"] = ordered_json::array();
  for (const auto& e : s.dep_edges) {
    ordered_json edge = {e.head, e.dependent};
    if (e.label) edge.push_back(*e.label);
    j["dep_edges"].push_back(edge);
  }
  j["entities"] = ordered_json::array();
  for (const auto& e : s.entities) {
    ordered_json frags = ordered_json::array();
    for (const auto& f : e.fragments) frags.push_back({f.start, f.end});
    j["entities"].push_back({{"type", e.type}, {"fragments", frags}});
  }
  if (s.vectors) {
    ordered_json rows = ordered_json::array();
    for (std::size_t r = 0; r < s.vectors->rows(); ++r) {
      auto span = s.vectors->row_span(r);
      rows.push_back(std::vector<double>(span.begin(), span.end()));
    }
    j["vectors"] = rows;
  }
  return j.dump();
}

std::vector<AnnotatedSentence> read_corpus(std::istream& in) {
  std::vector<AnnotatedSentence> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_sentence(line, line_no));
  }
  return out;
}

std::vector<AnnotatedSentence> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file " + path);
  try {
    return read_corpus(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void write_corpus(std::ostream& out, const std::vector<AnnotatedSentence>& corpus) {
  for (const auto& s : corpus) out << sentence_to_json(s) << '\n';
}

void save_corpus(const std::string& path, const std::vector<AnnotatedSentence>& corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  write_corpus(out, corpus);
}

WordVectors read_word_vectors(std::istream& in) {
  WordVectors wv;
  std::string header;
  if (!std::getline(in, header)) return wv;
  std::istringstream hs(header);
  std::size_t count = 0;
  if (!(hs >> count >> wv.dim)) throw DataError("embedding header must be \"V D\"", 1);
  std::string line;
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(in, line))
      throw DataError("expected " + std::to_string(count) + " vectors, got " + std::to_string(i),
                      i + 2);
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    std::vector<double> v(wv.dim);
    for (auto& x : v)
      if (!(ls >> x)) throw DataError("vector for \"" + word + "\" is too short", i + 2);
    wv.vectors[word] = std::move(v);
  }
  return wv;
}

WordVectors load_word_vectors(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embedding file " + path);
  return read_word_vectors(in);
}

}  // namespace sgner
