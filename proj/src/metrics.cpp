#include "sgner/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace sgner {

const char* category_name(Category c) {
  switch (c) {
    case Category::regular: return "regular";
    case Category::overlapped: return "overlapped";
    case Category::discontinuous: return "discontinuous";
  }
  return "?";
}

namespace {

bool shares_token(const std::vector<Fragment>& a, const std::vector<Fragment>& b) {
  for (const auto& x : a)
    for (const auto& y : b)
      if (x.intersects(y)) return true;
  return false;
}

Category category_of_fragments(const std::vector<Fragment>& frags, std::size_t self,
                               const std::vector<std::vector<Fragment>>& all) {
  if (frags.size() > 1) return Category::discontinuous;
  for (std::size_t i = 0; i < all.size(); ++i)
    if (i != self && shares_token(frags, all[i])) return Category::overlapped;
  return Category::regular;
}

const std::vector<std::pair<std::string, std::vector<Category>>>& group_defs() {
  static const std::vector<std::pair<std::string, std::vector<Category>>> defs = {
      {"r", {Category::regular}},
      {"r+o", {Category::regular, Category::overlapped}},
      {"r+d", {Category::regular, Category::discontinuous}},
      {"r+o+d", {Category::regular, Category::overlapped, Category::discontinuous}},
  };
  return defs;
}

}  // namespace

Category category_of(const Entity& entity, const std::vector<Entity>& sentence_entities) {
  std::vector<std::vector<Fragment>> all;
  std::size_t self = sentence_entities.size();
  for (std::size_t i = 0; i < sentence_entities.size(); ++i) {
    all.push_back(sentence_entities[i].fragments);
    if (self == sentence_entities.size() && sentence_entities[i] == entity) self = i;
  }
  return category_of_fragments(entity.fragments, self, all);
}

bool match_entity(const EntityPrediction& pred, const Entity& gold) {
  if (pred.type != gold.type) return false;
  auto a = pred.fragments;
  auto b = gold.fragments;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return a == b;
}

double Counts::precision() const {
  return predicted() ? static_cast<double>(tp) / static_cast<double>(predicted()) : 0.0;
}

double Counts::recall() const {
  return gold() ? static_cast<double>(tp) / static_cast<double>(gold()) : 0.0;
}

double Counts::f1() const {
  const double p = precision(), r = recall();
  return p + r > 0 ? 2 * p * r / (p + r) : 0.0;
}

Counts& Counts::operator+=(const Counts& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  return *this;
}

EvalReport evaluate(const std::vector<std::vector<EntityPrediction>>& preds,
                    const std::vector<AnnotatedSentence>& golds) {
  if (preds.size() != golds.size())
    throw DataError("prediction file has " + std::to_string(preds.size()) +
                    " sentences, gold has " + std::to_string(golds.size()));
  EvalReport rep;
  for (const auto& [name, members] : group_defs()) rep.groups.push_back({name, members, {}});

  for (std::size_t s = 0; s < golds.size(); ++s) {
    const auto& gold = golds[s].entities;
    // deduplicate predictions
    std::vector<EntityPrediction> pred;
    for (const auto& p : preds[s]) {
      EntityPrediction q = p;
      std::sort(q.fragments.begin(), q.fragments.end());
      if (std::none_of(pred.begin(), pred.end(), [&](const auto& o) { return o.same_entity(q); }))
        pred.push_back(std::move(q));
    }
    std::vector<std::vector<Fragment>> gold_frags, pred_frags;
    for (const auto& g : gold) gold_frags.push_back(g.fragments);
    for (const auto& p : pred) pred_frags.push_back(p.fragments);
    std::vector<Category> gcat, pcat;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      gcat.push_back(category_of_fragments(gold_frags[i], i, gold_frags));
      ++rep.gold_by_category[static_cast<std::size_t>(gcat.back())];
    }
    for (std::size_t i = 0; i < pred.size(); ++i)
      pcat.push_back(category_of_fragments(pred_frags[i], i, pred_frags));

    // one-to-one greedy matching
    std::vector<int> gold_match(gold.size(), -1), pred_match(pred.size(), -1);
    for (std::size_t p = 0; p < pred.size(); ++p)
      for (std::size_t g = 0; g < gold.size(); ++g)
        if (gold_match[g] < 0 && match_entity(pred[p], gold[g])) {
          gold_match[g] = static_cast<int>(p);
          pred_match[p] = static_cast<int>(g);
          break;
        }

    auto tally = [&](Counts& c, auto in_group) {
      for (std::size_t g = 0; g < gold.size(); ++g) {
        if (!in_group(gcat[g])) continue;
        if (gold_match[g] >= 0)
          ++c.tp;
        else
          ++c.fn;
      }
      for (std::size_t p = 0; p < pred.size(); ++p) {
        if (!in_group(pcat[p])) continue;
        // matched predictions were counted through their gold partner, whose
        // category they take
        if (pred_match[p] < 0) ++c.fp;
      }
    };
    tally(rep.overall, [](Category) { return true; });
    for (auto& grp : rep.groups)
      tally(grp.counts, [&](Category c) {
        return std::find(grp.members.begin(), grp.members.end(), c) != grp.members.end();
      });
  }
  return rep;
}

std::string EvalReport::to_json() const {
  auto counts_json = [](const Counts& c) {
    nlohmann::ordered_json j;
    j["tp"] = c.tp;
    j["fp"] = c.fp;
    j["fn"] = c.fn;
    j["precision"] = c.precision();
    j["recall"] = c.recall();
    j["f1"] = c.f1();
    return j;
  };
  nlohmann::ordered_json j;
  j["overall"] = counts_json(overall);
  j["gold_by_category"] = {{"regular", gold_by_category[0]},
                           {"overlapped", gold_by_category[1]},
                           {"discontinuous", gold_by_category[2]}};
  j["groups"] = nlohmann::ordered_json::object();
  for (const auto& g : groups) j["groups"][g.name] = counts_json(g.counts);
  return j.dump(2);
}

std::string EvalReport::to_table() const {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-8s %6s %6s %6s %8s %8s %8s\n", "group", "TP", "FP", "FN", "P",
                "R", "F1");
  os << buf;
  auto line = [&](const std::string& name, const Counts& c) {
    std::snprintf(buf, sizeof buf, "%-8s %6zu %6zu %6zu %8.4f %8.4f %8.4f\n", name.c_str(), c.tp,
                  c.fp, c.fn, c.precision(), c.recall(), c.f1());
    os << buf;
  };
  line("overall", overall);
  for (const auto& g : groups) line(g.name, g.counts);
  std::snprintf(buf, sizeof buf, "gold entities: %zu regular, %zu overlapped, %zu discontinuous\n",
                gold_by_category[0], gold_by_category[1], gold_by_category[2]);
  os << buf;
  return os.str();
}

}  // namespace sgner
