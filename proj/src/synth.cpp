#include "sgner/synth.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "sgner/cliques.hpp"
#include "sgner/rng.hpp"

namespace sgner {

namespace {

constexpr const char* kOnsets[] = {"b", "c", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z"};
constexpr const char* kVowels[] = {"a", "e", "i", "o", "u"};
constexpr std::size_t kLexiconSize = 24;
constexpr std::size_t kFillerSize = 48;

std::string pseudo_word(std::size_t id, const std::string& prefix) {
  std::string w = prefix;
  std::size_t x = id;
  for (int k = 0; k < 2; ++k) {
    w += kOnsets[x % 15];
    x /= 15;
    w += kVowels[x % 5];
    x /= 5;
  }
  return w + std::to_string(id);
}

struct Placed {
  std::vector<Entity> entities;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // (head, dependent)
  std::vector<std::size_t> tops;                           // construction roots
};

class SentenceBuilder {
 public:
  SentenceBuilder(const SynthSpec& spec, Rng& rng) : spec_(spec), rng_(rng) {}

  AnnotatedSentence build(std::size_t length) {
    words_.assign(length, "");
    types_.assign(length, -1);
    placed_ = {};
    std::size_t pos = 0;
    std::size_t made = 0;
    while (made < spec_.max_constructions) {
      if (made > 0 || rng_.bernoulli(0.5)) {
        const auto gap = static_cast<std::size_t>(rng_.uniform_int(1, 2));
        if (made > 0 || pos + gap + 5 <= length) pos += gap;  // filler gap
      }
      const std::size_t room = pos < length ? length - pos : 0;
      const std::size_t used = place_construction(pos, room, made == 0);
      if (used == 0) break;
      pos += used;
      ++made;
    }
    if (made == 0) throw std::invalid_argument("synth: sentence too short for any construction");
    for (std::size_t i = 0; i < length; ++i)
      if (words_[i].empty())
        words_[i] = pseudo_word(static_cast<std::size_t>(rng_.uniform_int(0, kFillerSize - 1)), "");
    AnnotatedSentence s;
    s.tokens = make_tokens(words_);
    s.entities = placed_.entities;
    std::sort(s.entities.begin(), s.entities.end(), [](const Entity& a, const Entity& b) {
      return a.fragments < b.fragments || (a.fragments == b.fragments && a.type < b.type);
    });
    s.dep_edges = make_tree(length);
    return s;
  }

 private:
  std::string entity_word(std::size_t type) {
    const auto id = static_cast<std::size_t>(rng_.uniform_int(0, kLexiconSize - 1));
    return pseudo_word(id, spec_.types[type].substr(0, 2) + "_");
  }

  std::size_t random_type() {
    return static_cast<std::size_t>(rng_.uniform_int(0, static_cast<int>(spec_.types.size()) - 1));
  }

  Fragment fill(std::size_t start, std::size_t width, std::size_t type) {
    for (std::size_t i = start; i < start + width; ++i) {
      words_[i] = entity_word(type);
      types_[i] = static_cast<int>(type);
    }
    const std::size_t last = start + width - 1;
    for (std::size_t i = start; i < last; ++i) placed_.edges.emplace_back(last, i);
    return {start, last};
  }

  // Returns tokens consumed, 0 when nothing fits into `room`.
  std::size_t place_construction(std::size_t pos, std::size_t room, bool must_fit) {
    const double u = rng_.uniform();
    const bool discont = u < spec_.p_discont;
    const bool nested = !discont && u < spec_.p_discont + spec_.p_overlap;
    if (discont) {
      bool shared = rng_.bernoulli(spec_.p_shared);
      std::size_t nfrag = shared ? 3 : static_cast<std::size_t>(rng_.uniform_int(2, 3));
      std::vector<std::size_t> widths(nfrag), gaps(nfrag - 1);
      for (auto& w : widths) w = static_cast<std::size_t>(rng_.uniform_int(1, 2));
      for (auto& g : gaps) g = static_cast<std::size_t>(rng_.uniform_int(1, 2));
      auto total = [&] {
        std::size_t t = 0;
        for (auto w : widths) t += w;
        for (auto g : gaps) t += g;
        return t;
      };
      if (total() > room && must_fit) {
        std::fill(widths.begin(), widths.end(), 1);
        std::fill(gaps.begin(), gaps.end(), 1);
        if (total() > room && nfrag == 3) {
          widths.pop_back();
          gaps.pop_back();
          nfrag = 2;
          shared = false;
        }
      }
      if (total() > room) return 0;
      const std::size_t type = random_type();
      std::vector<Fragment> frags;
      std::size_t p = pos;
      for (std::size_t k = 0; k < nfrag; ++k) {
        frags.push_back(fill(p, widths[k], type));
        p += widths[k] + (k + 1 < nfrag ? gaps[k] : 0);
      }
      for (std::size_t k = 1; k < nfrag; ++k) placed_.edges.emplace_back(frags[0].end, frags[k].end);
      placed_.tops.push_back(frags[0].end);
      const std::string& name = spec_.types[type];
      if (shared) {
        placed_.entities.push_back({name, {frags[0], frags[1]}});
        placed_.entities.push_back({name, {frags[0], frags[2]}});
      } else {
        placed_.entities.push_back({name, frags});
      }
      return total();
    }
    if (nested) {
      if (spec_.types.size() < 2) throw std::invalid_argument("synth: nesting needs two entity types");
      std::size_t outer = static_cast<std::size_t>(rng_.uniform_int(2, 3));
      if (outer > room && must_fit) outer = 2;
      if (outer > room) return 0;
      const std::size_t inner = static_cast<std::size_t>(rng_.uniform_int(1, static_cast<int>(outer) - 1));
      const bool left = rng_.bernoulli(0.5);
      const std::size_t outer_type = random_type();
      const std::size_t inner_type = (outer_type + 1 + static_cast<std::size_t>(rng_.uniform_int(
                                          0, static_cast<int>(spec_.types.size()) - 2))) %
                                     spec_.types.size();
      const Fragment of = fill(pos, outer, outer_type);
      const std::size_t istart = left ? pos : pos + outer - inner;
      for (std::size_t i = istart; i < istart + inner; ++i) {
        words_[i] = entity_word(inner_type);
        types_[i] = static_cast<int>(inner_type);
      }
      placed_.tops.push_back(of.end);
      placed_.entities.push_back({spec_.types[outer_type], {of}});
      placed_.entities.push_back({spec_.types[inner_type], {{istart, istart + inner - 1}}});
      return outer;
    }
    std::size_t width = static_cast<std::size_t>(rng_.uniform_int(1, 3));
    if (width > room && must_fit) width = std::max<std::size_t>(1, room);
    if (width > room) return 0;
    const std::size_t type = random_type();
    const Fragment f = fill(pos, width, type);
    placed_.tops.push_back(f.end);
    placed_.entities.push_back({spec_.types[type], {f}});
    return width;
  }

  std::vector<DependencyEdge> make_tree(std::size_t length) {
    std::vector<char> has_head(length, 0);
    std::vector<DependencyEdge> edges;
    for (auto [h, d] : placed_.edges) {
      if (has_head[d]) continue;
      has_head[d] = 1;
      edges.push_back({h, d, std::nullopt});
    }
    std::vector<std::size_t> loose;
    for (std::size_t i = 0; i < length; ++i)
      if (!has_head[i]) loose.push_back(i);
    for (std::size_t i = loose.size(); i > 1; --i)
      std::swap(loose[i - 1], loose[static_cast<std::size_t>(rng_.uniform_int(0, static_cast<int>(i) - 1))]);
    // attach each loose subtree root below a node already in the tree
    std::vector<std::size_t> in_tree = {loose.front()};
    auto absorb = [&](std::size_t root) {
      std::vector<std::size_t> stack = {root};
      while (!stack.empty()) {
        const std::size_t v = stack.back();
        stack.pop_back();
        for (const auto& e : edges)
          if (e.head == v && std::find(in_tree.begin(), in_tree.end(), e.dependent) == in_tree.end()) {
            in_tree.push_back(e.dependent);
            stack.push_back(e.dependent);
          }
      }
    };
    absorb(loose.front());
    for (std::size_t k = 1; k < loose.size(); ++k) {
      const std::size_t head =
          in_tree[static_cast<std::size_t>(rng_.uniform_int(0, static_cast<int>(in_tree.size()) - 1))];
      edges.push_back({head, loose[k], std::nullopt});
      in_tree.push_back(loose[k]);
      absorb(loose[k]);
    }
    std::sort(edges.begin(), edges.end(), [](const DependencyEdge& a, const DependencyEdge& b) {
      return a.dependent < b.dependent;
    });
    return edges;
  }

  const SynthSpec& spec_;
  Rng& rng_;
  std::vector<std::string> words_;
  std::vector<int> types_;
  Placed placed_;
};

void check_spec(const SynthSpec& spec) {
  if (spec.p_overlap < 0 || spec.p_discont < 0 || spec.p_overlap + spec.p_discont > 1.0 + 1e-12)
    throw std::invalid_argument("synth: need p_overlap, p_discont >= 0 with p_overlap + p_discont <= 1");
  if (spec.p_shared < 0 || spec.p_shared > 1) throw std::invalid_argument("synth: p_shared outside [0,1]");
  if (spec.sentences == 0) return;
  if (spec.min_len == 0 || spec.min_len > spec.max_len)
    throw std::invalid_argument("synth: need 1 <= min_len <= max_len");
  if (spec.types.empty()) throw std::invalid_argument("synth: no entity types");
  if (spec.max_constructions == 0) throw std::invalid_argument("synth: max_constructions must be >= 1");
  if (spec.p_discont > 0 && spec.min_len < 3)
    throw std::invalid_argument("synth: discontinuous entities need sentences of >= 3 tokens (min_len=" +
                                std::to_string(spec.min_len) + ")");
  if (spec.p_overlap > 0 && spec.min_len < 2)
    throw std::invalid_argument("synth: nested entities need sentences of >= 2 tokens");
  if (spec.p_overlap > 0 && spec.types.size() < 2)
    throw std::invalid_argument("synth: nested entities need at least two entity types");
}

}  // namespace

bool gold_decodable(const AnnotatedSentence& s) {
  const auto frags = gold_fragments(s);
  UndirectedGraph g(frags.size());
  auto index = [&](const Fragment& f) {
    return static_cast<std::size_t>(std::lower_bound(frags.begin(), frags.end(), f) - frags.begin());
  };
  std::set<std::pair<std::string, std::vector<std::size_t>>> want;
  for (const auto& e : s.entities) {
    std::vector<std::size_t> ids;
    for (const auto& f : e.fragments) ids.push_back(index(f));
    for (std::size_t a = 0; a < ids.size(); ++a)
      for (std::size_t b = a + 1; b < ids.size(); ++b) g.add_edge(ids[a], ids[b]);
    want.emplace(e.type, ids);
  }
  std::set<std::pair<std::string, std::vector<std::size_t>>> got;
  for (const auto& c : maximal_cliques(g)) {
    // a clique decodes to one entity of its (shared) type
    std::string type;
    for (const auto& e : s.entities)
      if (std::find(e.fragments.begin(), e.fragments.end(), frags[c.front()]) != e.fragments.end()) {
        type = e.type;
        break;
      }
    got.emplace(type, c);
  }
  return got == want;
}

std::vector<AnnotatedSentence> synthesize_corpus(const SynthSpec& spec, std::uint64_t seed) {
  check_spec(spec);
  Rng rng(seed, "synth");
  std::vector<AnnotatedSentence> out;
  out.reserve(spec.sentences);
  SentenceBuilder builder(spec, rng);
  while (out.size() < spec.sentences) {
    const auto len = static_cast<std::size_t>(
        rng.uniform_int(static_cast<int>(spec.min_len), static_cast<int>(spec.max_len)));
    AnnotatedSentence s = builder.build(len);
    if (!validate(s).empty() || !gold_decodable(s)) continue;
    if (spec.vector_dim > 0) {
      Tensor v(s.size(), spec.vector_dim);
      for (std::size_t i = 0; i < s.size(); ++i) {
        Rng wr(seed, "vec:" + s.tokens[i].text);
        for (std::size_t c = 0; c < spec.vector_dim; ++c) v(i, c) = wr.normal(0.0, 1.0);
      }
      s.vectors = std::move(v);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace sgner
