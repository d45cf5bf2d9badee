#include "sgner/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace sgner {

Vocabulary::Vocabulary() : Vocabulary(std::vector<std::string>{}) {}

Vocabulary::Vocabulary(const std::vector<std::string>& words) {
  words_.push_back(kUnkToken);
  index_.emplace(kUnkToken, kUnk);
  for (const auto& w : words)
    if (index_.emplace(w, words_.size()).second) words_.push_back(w);
}

std::size_t Vocabulary::lookup(const std::string& word) const {
  auto it = index_.find(word);
  return it == index_.end() ? kUnk : it->second;
}

Vocabulary build_vocabulary(const std::vector<AnnotatedSentence>& corpus,
                            const std::vector<std::string>& extra) {
  std::set<std::string> words(extra.begin(), extra.end());
  for (const auto& s : corpus)
    for (const auto& t : s.tokens) words.insert(t.text);
  words.erase(Vocabulary::kUnkToken);
  return Vocabulary(std::vector<std::string>(words.begin(), words.end()));
}

EmbeddingTable::EmbeddingTable(ParameterStore& store, Vocabulary vocab, std::size_t dim, Rng& rng)
    : vocab_(std::move(vocab)),
      table_(&store.add("embed.words", normal_table(vocab_.size(), dim, 0.02, rng),
                        ParamGroup::encoder)) {}

std::size_t EmbeddingTable::load_pretrained(const WordVectors& vectors) {
  if (vectors.dim != dim())
    throw DataError("embedding file has dimension " + std::to_string(vectors.dim) +
                    ", model expects d_emb=" + std::to_string(dim()));
  std::size_t replaced = 0;
  for (std::size_t r = 1; r < vocab_.size(); ++r) {
    auto it = vectors.vectors.find(vocab_.words()[r]);
    if (it == vectors.vectors.end()) continue;
    std::copy(it->second.begin(), it->second.end(), table_->value.data() + r * dim());
    ++replaced;
  }
  return replaced;
}

Var EmbeddingTable::lookup(Tape& tape, const std::vector<Token>& tokens) const {
  std::vector<std::size_t> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(vocab_.lookup(t.text));
  return ops::gather_rows(tape.param(*table_), ids);
}

Tensor build_adjacency(const AnnotatedSentence& s) {
  const std::size_t n = s.size();
  Tensor a = Tensor::identity(n);
  for (const auto& e : s.dep_edges) {
    a(e.head, e.dependent) = 1.0;
    a(e.dependent, e.head) = 1.0;
  }
  return a;
}

Var gcn_layer(Var x, Var adjacency, Var weight, Var bias) {
  if (adjacency.rows() != x.rows() || adjacency.cols() != x.rows())
    throw ShapeError("gcn_layer: adjacency " + shape_string(adjacency.value()) + " for input " +
                     shape_string(x.value()));
  return ops::relu(ops::add_row(ops::matmul(adjacency, ops::matmul(x, weight)), bias));
}

Var attention_adjacency(Var head_input, Var wq, Var wk) {
  const double d_head = static_cast<double>(head_input.cols());
  Var q = ops::matmul(head_input, wq);
  Var k = ops::matmul(head_input, wk);
  return ops::softmax_rows(ops::scale(ops::matmul_nt(q, k), 1.0 / std::sqrt(d_head)));
}

BiLstm::BiLstm(ParameterStore& store, const std::string& prefix, std::size_t d_in,
               std::size_t d_out, Rng& rng)
    : hidden_(d_out / 2) {
  if (d_out == 0 || d_out % 2 != 0)
    throw ConfigError({"bilstm output width " + std::to_string(d_out) + " must be even and positive"});
  auto make = [&](const std::string& dir) {
    const std::string p = prefix + "." + dir;
    return Direction{
        &store.add(p + ".wx", glorot(d_in, 4 * hidden_, rng), ParamGroup::encoder),
        &store.add(p + ".wh", glorot(hidden_, 4 * hidden_, rng), ParamGroup::encoder),
        &store.add(p + ".b", Tensor(1, 4 * hidden_), ParamGroup::encoder)};
  };
  fwd_ = make("fwd");
  bwd_ = make("bwd");
}

Var BiLstm::run(Tape& tape, Var xw, const Direction& d, bool reverse) const {
  const std::size_t n = xw.rows();
  const std::size_t h = hidden_;
  Var wh = tape.param(*d.wh);
  Var state = tape.constant(Tensor(1, h));
  Var cell = tape.constant(Tensor(1, h));
  std::vector<Var> outputs(n);
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t t = reverse ? n - 1 - step : step;
    Var gates = ops::add(ops::row(xw, t), ops::matmul(state, wh));
    Var in = ops::sigmoid(ops::slice_cols(gates, 0, h));
    Var forget = ops::sigmoid(ops::slice_cols(gates, h, h));
    Var cand = ops::tanh(ops::slice_cols(gates, 2 * h, h));
    Var out = ops::sigmoid(ops::slice_cols(gates, 3 * h, h));
    cell = ops::add(ops::mul(forget, cell), ops::mul(in, cand));
    state = ops::mul(out, ops::tanh(cell));
    outputs[t] = state;
  }
  return ops::concat_rows(outputs);
}

Var BiLstm::forward(Tape& tape, Var input) const {
  if (input.rows() == 0) throw ShapeError("bilstm: empty input");
  auto project = [&](const Direction& d) {
    return ops::add_row(ops::matmul(input, tape.param(*d.wx)), tape.param(*d.b));
  };
  Var f = run(tape, project(fwd_), fwd_, false);
  Var b = run(tape, project(bwd_), bwd_, true);
  return ops::concat_cols({f, b});
}

Aggcn::Aggcn(ParameterStore& store, const ModelConfig& cfg, Rng& rng)
    : d_h_(cfg.d_h), d_f_(cfg.d_f), n_head_(cfg.n_head) {
  if (n_head_ == 0 || d_h_ % n_head_ != 0)
    throw ConfigError({"n_head (" + std::to_string(n_head_) + ") must divide d_h (" +
                       std::to_string(d_h_) + ")"});
  if (cfg.dense_sublayers == 0 || d_h_ % cfg.dense_sublayers != 0)
    throw ConfigError({"dense_sublayers must divide d_h"});
  const std::size_t d_sub = d_h_ / cfg.dense_sublayers;
  const std::size_t d_head = d_h_ / n_head_;
  for (std::size_t b = 0; b < cfg.gcn_blocks; ++b) {
    Block block;
    for (std::size_t t = 0; t < n_head_; ++t) {
      const std::string p = "gcn.b" + std::to_string(b) + ".h" + std::to_string(t);
      Head head;
      for (std::size_t k = 0; k < cfg.dense_sublayers; ++k) {
        const std::size_t d_in = d_h_ + k * d_sub;
        const std::string q = p + ".l" + std::to_string(k);
        head.dense.push_back({&store.add(q + ".w", glorot(d_in, d_sub, rng), ParamGroup::encoder),
                              &store.add(q + ".b", Tensor(1, d_sub), ParamGroup::encoder)});
      }
      if (b > 0) {
        head.wq = &store.add(p + ".wq", glorot(d_head, d_head, rng), ParamGroup::encoder);
        head.wk = &store.add(p + ".wk", glorot(d_head, d_head, rng), ParamGroup::encoder);
      }
      block.heads.push_back(std::move(head));
    }
    block.merge = &store.add("gcn.b" + std::to_string(b) + ".merge",
                             glorot(n_head_ * d_h_, d_h_, rng), ParamGroup::encoder);
    blocks_.push_back(std::move(block));
  }
  reduce_ = &store.add("gcn.reduce", glorot(d_h_, d_f_, rng), ParamGroup::encoder);
}

Var Aggcn::dense_stack(Var x, Var adjacency, const Head& head, Tape& tape) const {
  std::vector<Var> inputs = {x};
  std::vector<Var> outputs;
  for (const Sublayer& layer : head.dense) {
    Var in = inputs.size() == 1 ? x : ops::concat_cols(inputs);
    Var out = gcn_layer(in, adjacency, tape.param(*layer.w), tape.param(*layer.b));
    inputs.push_back(out);
    outputs.push_back(out);
  }
  return outputs.size() == 1 ? outputs.front() : ops::concat_cols(outputs);
}

Var Aggcn::merged(Tape& tape, Var h, const Tensor& adjacency) const {
  if (h.cols() != d_h_)
    throw ShapeError("aggcn: input width " + std::to_string(h.cols()) + " != d_h " +
                     std::to_string(d_h_));
  const std::size_t d_head = d_h_ / n_head_;
  Var hard = tape.constant(adjacency);
  Var x = h;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    std::vector<Var> heads;
    for (std::size_t t = 0; t < n_head_; ++t) {
      const Head& head = blocks_[b].heads[t];
      Var adj = hard;
      if (b > 0)
        adj = attention_adjacency(ops::slice_cols(x, t * d_head, d_head), tape.param(*head.wq),
                                  tape.param(*head.wk));
      heads.push_back(dense_stack(x, adj, head, tape));
    }
    x = ops::matmul(ops::concat_cols(heads), tape.param(*blocks_[b].merge));
  }
  return x;
}

Var Aggcn::forward(Tape& tape, Var h, const Tensor& adjacency) const {
  Var tilde = merged(tape, h, adjacency);
  return ops::concat_cols({h, ops::matmul(tilde, tape.param(*reduce_))});
}

}  // namespace sgner
