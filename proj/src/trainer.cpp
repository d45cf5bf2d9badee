#include "sgner/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>

#include "sgner/decoder.hpp"
#include "sgner/metrics.hpp"
#include "sgner/optim.hpp"

namespace sgner {

Supervision assemble_supervision(const AnnotatedSentence&, const GoldLabels& gold,
                                 const Model& model, const TrainConfig& cfg, Rng* rng) {
  Supervision sup;
  std::map<Fragment, std::size_t> row_of;
  std::size_t row = 0;
  for (const auto& [span, label] : gold.spans.labels) {
    row_of.emplace(span, row);
    const std::size_t cls = label ? model.type_index(*label) : 0;
    const bool keep = cls != 0 || cfg.negative_keep >= 1.0 || !rng || rng->bernoulli(cfg.negative_keep);
    if (keep) {
      sup.spans.push_back(span);
      sup.span_rows.push_back(row);
      sup.span_classes.push_back(cls);
    }
    ++row;
  }
  for (const auto& [pair, rel] : gold.pairs) {
    auto a = row_of.find(pair.first);
    auto b = row_of.find(pair.second);
    if (a == row_of.end() || b == row_of.end()) continue;  // wider than max_span_width
    Relation r = rel;
    if (cfg.no_overlap_relation && r == Relation::overlapping) r = Relation::other;
    sup.pair_rows.emplace_back(a->second, b->second);
    sup.pairs.push_back(pair);
    sup.pair_classes.push_back(static_cast<std::size_t>(r));
  }
  return sup;
}

Var sentence_loss(Tape& tape, const AnnotatedSentence& s, const Supervision& sup,
                  const Model& model, const LossWeights& w) {
  const SentenceForward fw = model.forward(tape, s);
  Var logits = fw.span_logits;
  if (sup.span_rows.size() != fw.spans.size()) logits = ops::gather_rows(logits, sup.span_rows);
  Var loss = ops::scale(ops::softmax_cross_entropy(logits, sup.span_classes), w.alpha);
  if (!sup.pair_rows.empty()) {
    Var pair = ops::softmax_cross_entropy(model.pair_logits(tape, fw, sup.pair_rows), sup.pair_classes);
    loss = ops::add(loss, ops::scale(pair, w.beta));
  }
  return loss;
}

Var compute_loss(Tape& tape, const std::vector<const AnnotatedSentence*>& batch,
                 const std::vector<const Supervision*>& targets, const Model& model,
                 const LossWeights& w) {
  if (batch.empty() || batch.size() != targets.size())
    throw std::invalid_argument("compute_loss: empty or misaligned batch");
  Var total;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    Var l = sentence_loss(tape, *batch[i], *targets[i], model, w);
    total = total.valid() ? ops::add(total, l) : l;
  }
  return ops::scale(total, 1.0 / static_cast<double>(batch.size()));
}

std::string epoch_csv_header() { return "epoch,train_loss,dev_P,dev_R,dev_F1,best_so_far"; }

std::string epoch_csv_line(const EpochLog& e) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%.6f,%.6f,%.6f", e.epoch, e.train_loss, e.dev_p,
                e.dev_r, e.dev_f1, e.best_so_far);
  return buf;
}

std::unique_ptr<Model> build_model(const std::vector<AnnotatedSentence>& corpus, RunConfig& cfg) {
  const auto found = collect_entity_types(corpus);
  if (cfg.model.entity_types.empty()) {
    cfg.model.entity_types = found;
  } else {
    for (const auto& t : found)
      if (std::find(cfg.model.entity_types.begin(), cfg.model.entity_types.end(), t) ==
          cfg.model.entity_types.end())
        throw DataError("training corpus type \"" + t + "\" missing from entity_type_set");
  }
  if (cfg.model.entity_types.empty()) throw DataError("training corpus has no entities");
  std::vector<std::string> extra;
  WordVectors pretrained;
  if (!cfg.embedding_path.empty()) {
    pretrained = load_word_vectors(cfg.embedding_path);
    for (const auto& [w, v] : pretrained.vectors) extra.push_back(w);
  }
  auto model = std::make_unique<Model>(cfg.model, build_vocabulary(corpus, extra),
                                       corpus_vector_dim(corpus), cfg.train.seed);
  if (!cfg.embedding_path.empty()) model->embeddings().load_pretrained(pretrained);
  return model;
}

TrainResult train(const std::vector<AnnotatedSentence>& corpus,
                  const std::vector<AnnotatedSentence>& dev, RunConfig cfg,
                  const TrainOptions& opts) {
  if (corpus.empty()) throw DataError("training corpus is empty");
  TrainResult res;
  res.model = build_model(corpus, cfg);
  res.config = cfg;
  Model& model = *res.model;
  const TrainConfig& tc = cfg.train;
  const LossWeights weights{tc.alpha, tc.beta};

  std::vector<GoldLabels> gold;
  gold.reserve(corpus.size());
  for (const auto& s : corpus) gold.push_back(derive_gold_labels(s, cfg.model.max_span_width));
  Rng sample_rng(tc.seed, "negatives");
  std::vector<Supervision> fixed;
  if (tc.negative_keep >= 1.0)
    for (std::size_t i = 0; i < corpus.size(); ++i)
      fixed.push_back(assemble_supervision(corpus[i], gold[i], model, tc));

  const auto params = model.params().all();
  Adam adam(params, AdamOptions{tc.lr_encoder, tc.lr_heads});
  Rng shuffle_rng(tc.seed, "shuffle");

  std::vector<Tensor> best_values;
  double best = -1.0;
  std::size_t since_best = 0;
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 1; epoch <= tc.max_epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[static_cast<std::size_t>(shuffle_rng.uniform_int(0, static_cast<int>(i) - 1))]);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += tc.batch_size) {
      const std::size_t stop = std::min(order.size(), start + tc.batch_size);
      std::vector<const AnnotatedSentence*> batch;
      std::vector<Supervision> sampled;
      std::vector<const Supervision*> targets;
      for (std::size_t k = start; k < stop; ++k) {
        const std::size_t idx = order[k];
        batch.push_back(&corpus[idx]);
        if (fixed.empty()) sampled.push_back(assemble_supervision(corpus[idx], gold[idx], model, tc, &sample_rng));
      }
      for (std::size_t k = 0; k < batch.size(); ++k)
        targets.push_back(fixed.empty() ? &sampled[k] : &fixed[order[start + k]]);
      adam.zero_grad();
      Tape tape;
      Var loss = compute_loss(tape, batch, targets, model, weights);
      if (!std::isfinite(loss.value()[0]))
        throw NumericError("non-finite training loss at epoch " + std::to_string(epoch));
      loss_sum += loss.value()[0] * static_cast<double>(batch.size());
      tape.backward(loss);
      clip_grad_norm(params, tc.grad_clip);
      adam.step();
    }
    EpochLog entry;
    entry.epoch = epoch;
    entry.train_loss = loss_sum / static_cast<double>(corpus.size());
    const EvalReport rep = evaluate(decode_corpus(dev, model, opts.jobs), dev);
    entry.dev_p = rep.overall.precision();
    entry.dev_r = rep.overall.recall();
    entry.dev_f1 = rep.overall.f1();
    if (entry.dev_f1 > best) {
      best = entry.dev_f1;
      res.best_epoch = epoch;
      since_best = 0;
      best_values.clear();
      for (const Parameter* p : params) best_values.push_back(p->value);
    } else {
      ++since_best;
    }
    entry.best_so_far = best;
    res.log.push_back(entry);
    if (opts.on_epoch) opts.on_epoch(entry);
    if (since_best >= tc.patience) break;
  }
  for (std::size_t i = 0; i < params.size() && i < best_values.size(); ++i)
    params[i]->value = best_values[i];
  res.best_f1 = std::max(best, 0.0);
  return res;
}

}  // namespace sgner
