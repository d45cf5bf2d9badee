#include "sgner/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>

#include "sgner/checkpoint.hpp"
#include "sgner/decoder.hpp"
#include "sgner/kernels.hpp"
#include "sgner/metrics.hpp"
#include "sgner/spans.hpp"
#include "sgner/synth.hpp"
#include "sgner/trainer.hpp"

namespace sgner {

namespace {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

class Logger {
 public:
  Logger(std::ostream& err, bool verbose) : err_(err) {
    if (const char* env = std::getenv("SGNER_LOG")) {
      const std::string v = env;
      if (v == "error") level_ = Level::error;
      else if (v == "warn") level_ = Level::warn;
      else if (v == "info") level_ = Level::info;
      else if (v == "debug") level_ = Level::debug;
    }
    if (verbose) level_ = Level::debug;
  }
  void operator()(Level l, const std::string& msg) const {
    static const char* names[] = {"error", "warn", "info", "debug"};
    if (l <= level_) err_ << "[" << names[static_cast<int>(l)] << "] " << msg << '\n';
  }

 private:
  std::ostream& err_;
  Level level_ = Level::info;
};

struct Common {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int jobs = 1;
  bool verbose = false;
  std::vector<std::string> sets;
  std::vector<std::string> ablations;
};

void add_common(CLI::App* cmd, Common& c, bool with_config = true) {
  if (with_config) {
    cmd->add_option("--config", c.config_path, "key=value configuration file");
    cmd->add_option("--set", c.sets, "override a config key (key=value), repeatable");
  }
  cmd->add_option("--seed", c.seed, "random seed");
  cmd->add_option("--jobs", c.jobs, "worker threads for prediction/evaluation")->check(CLI::PositiveNumber);
  cmd->add_flag("--verbose", c.verbose, "debug logging");
}

void require_file(const std::string& path) {
  if (!std::filesystem::exists(path)) throw DataError("no such file: " + path);
}

RunConfig resolve_config(const Common& c) {
  RunConfig cfg;
  if (!c.config_path.empty()) {
    require_file(c.config_path);
    cfg = load_config(c.config_path);
  }
  std::map<std::string, std::string> overrides;
  std::vector<std::string> errors;
  for (const auto& kv : c.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      errors.push_back("--set expects key=value, got \"" + kv + "\"");
      continue;
    }
    overrides[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  for (const auto& a : c.ablations) {
    if (a == "no_gcn" || a == "no_overlap_relation")
      overrides[a] = "on";
    else
      errors.push_back("unknown ablation \"" + a + "\" (expected no_gcn or no_overlap_relation)");
  }
  if (c.seed_given) overrides["seed"] = std::to_string(c.seed);
  try {
    cfg = finalize_config(cfg, overrides);
  } catch (const ConfigError& e) {
    errors.insert(errors.end(), e.errors().begin(), e.errors().end());
  }
  if (!errors.empty()) throw ConfigError(errors);
  return cfg;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << content;
}

int cmd_synth(const SynthSpec& spec, std::uint64_t seed, const std::string& out_path,
              const Logger& log) {
  const auto corpus = synthesize_corpus(spec, seed);
  save_corpus(out_path, corpus);
  std::array<std::size_t, 3> cats{};
  for (const auto& s : corpus)
    for (const auto& e : s.entities) ++cats[static_cast<std::size_t>(category_of(e, s.entities))];
  log(Level::info, "wrote " + std::to_string(corpus.size()) + " sentences to " + out_path + " (" +
                       std::to_string(cats[0]) + " regular, " + std::to_string(cats[1]) +
                       " overlapped, " + std::to_string(cats[2]) + " discontinuous entities)");
  return kExitOk;
}

int cmd_train(const Common& c, const std::string& train_path, const std::string& dev_path,
              const std::string& model_path, std::string log_path, const Logger& log) {
  std::vector<std::string> missing;
  for (const auto& p : {train_path, dev_path})
    if (!p.empty() && !std::filesystem::exists(p)) missing.push_back(p);
  if (!missing.empty()) throw DataError("no such file: " + missing.front());
  RunConfig cfg = resolve_config(c);
  const auto corpus = load_corpus(train_path);
  const auto dev = dev_path.empty() ? corpus : load_corpus(dev_path);
  if (log_path.empty()) log_path = model_path + ".log.csv";
  std::ofstream csv(log_path, std::ios::binary);
  if (!csv) throw DataError("cannot write " + log_path);
  csv << epoch_csv_header() << '\n';
  TrainOptions opts;
  opts.jobs = c.jobs;
  opts.on_epoch = [&](const EpochLog& e) {
    csv << epoch_csv_line(e) << '\n';
    csv.flush();
    log(Level::info, "epoch " + std::to_string(e.epoch) + " loss " + std::to_string(e.train_loss) +
                         " dev F1 " + std::to_string(e.dev_f1));
  };
  std::size_t excluded = 0;
  for (const auto& s : corpus) excluded += derive_span_labels(s, cfg.model.max_span_width).excluded_gold;
  if (excluded)
    log(Level::warn, std::to_string(excluded) + " gold fragments exceed max_span_width=" +
                         std::to_string(cfg.model.max_span_width) + " and cannot be recovered");
  TrainResult res = train(corpus, dev, cfg, opts);
  log(Level::info, "span representation width " + std::to_string(span_repr_dim(res.config.model)) +
                       ", " + std::to_string(res.model->params().scalar_count()) + " parameters");
  save_checkpoint(model_path, res.config, *res.model);
  log(Level::info, "best dev F1 " + std::to_string(res.best_f1) + " at epoch " +
                       std::to_string(res.best_epoch) + "; saved " + model_path);
  return kExitOk;
}

int cmd_predict(const Common& c, const std::string& model_path, const std::string& in_path,
                const std::string& out_path, const Logger& log) {
  require_file(model_path);
  require_file(in_path);
  const LoadedModel lm = load_checkpoint(model_path);
  const auto corpus = load_corpus(in_path);
  const auto preds = decode_corpus(corpus, *lm.model, c.jobs);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw DataError("cannot write " + out_path);
  write_predictions(out, preds);
  std::size_t n = 0;
  for (const auto& p : preds) n += p.size();
  log(Level::info, "predicted " + std::to_string(n) + " entities in " +
                       std::to_string(corpus.size()) + " sentences");
  return kExitOk;
}

int cmd_eval(const std::string& gold_path, const std::string& pred_path,
             const std::string& json_path, std::ostream& out) {
  require_file(gold_path);
  require_file(pred_path);
  const auto gold = load_corpus(gold_path);
  const auto preds = load_predictions(pred_path);
  const EvalReport rep = evaluate(preds, gold);
  out << rep.to_table();
  if (!json_path.empty()) write_file(json_path, rep.to_json() + "\n");
  return kExitOk;
}

int cmd_gradcheck(const Common& c, std::ostream& out) {
  const RunConfig cfg = resolve_config(c);
  const GradCheckReport rep = run_gradcheck(cfg, cfg.train.seed);
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "max relative error %.3e over %zu coordinates in %zu parameters\n"
                "worst parameter %s[%zu]: finite-difference %.10e, tape %.10e\n",
                rep.result.max_rel_error, rep.result.coordinates, rep.parameters,
                rep.result.worst_param.c_str(), rep.result.worst_index, rep.result.worst_fd,
                rep.result.worst_ad);
  out << buf;
  const bool ok = rep.result.max_rel_error < kGradCheckTolerance;
  out << (ok ? "PASS" : "FAIL") << " (tolerance " << kGradCheckTolerance << ")\n";
  return ok ? kExitOk : kExitNumeric;
}

int cmd_inspect(const std::string& in_path, std::size_t max_width, std::ostream& out) {
  require_file(in_path);
  const auto corpus = load_corpus(in_path);
  std::size_t excluded = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& s = corpus[i];
    const GoldLabels gold = derive_gold_labels(s, max_width);
    excluded += gold.spans.excluded_gold;
    out << "sentence " << i << ":";
    for (const auto& t : s.tokens) out << ' ' << t.text;
    out << '\n';
    for (const auto& e : s.entities) {
      out << "  entity " << e.type << " [" << category_name(category_of(e, s.entities)) << "]";
      for (const auto& f : e.fragments) out << " (" << f.start << "," << f.end << ")";
      out << '\n';
    }
    for (const auto& [span, label] : gold.spans.labels)
      if (label) out << "  span (" << span.start << "," << span.end << ") -> " << *label << '\n';
    for (const auto& [pair, rel] : gold.pairs)
      out << "  pair (" << pair.first.start << "," << pair.first.end << ")-(" << pair.second.start
          << "," << pair.second.end << ") -> " << relation_name(rel) << '\n';
    out << "  " << gold.spans.labels.size() << " spans, " << gold.pairs.size() << " gold pairs\n";
  }
  out << corpus.size() << " sentences; " << excluded << " gold fragments wider than max width "
      << max_width << '\n';
  return kExitOk;
}

}  // namespace

AnnotatedSentence gradcheck_sentence() {
  AnnotatedSentence s;
  s.tokens = make_tokens({"valve", "leaflets", "mildly", "thickened"});
  s.dep_edges = {{3, 1, std::nullopt}, {3, 2, std::nullopt}, {1, 0, std::nullopt}};
  s.entities = {{"Anatomy", {{0, 1}}}, {"Disorder", {{1, 1}, {3, 3}}}};
  return s;
}

RunConfig tiny_config(const RunConfig& cfg) {
  RunConfig t = cfg;
  auto& m = t.model;
  m.d_emb = 6;
  const std::size_t unit = std::lcm(cfg.model.n_head ? cfg.model.n_head : 1,
                                    cfg.model.dense_sublayers ? cfg.model.dense_sublayers : 1);
  m.d_h = 2 * unit * ((8 + 2 * unit - 1) / (2 * unit));
  if (!m.bilstm) m.d_emb = m.d_h;
  m.d_f = 4;
  m.mlp_hidden = 5;
  m.max_span_width = std::min<std::size_t>(cfg.model.max_span_width, 4);
  m.entity_types = {"Anatomy", "Disorder"};
  t.embedding_path.clear();
  return t;
}

GradCheckReport run_gradcheck(const RunConfig& cfg, std::uint64_t seed) {
  const RunConfig tiny = tiny_config(cfg);
  const AnnotatedSentence s = gradcheck_sentence();
  Model model(tiny.model, build_vocabulary({s}), 0, seed);
  // Unit-scale lookup tables keep every gradient well above finite-difference
  // noise; nonzero biases keep ReLU inputs off the kink.
  Rng rng(seed, "gradcheck");
  for (Parameter* p : model.params().all()) {
    const bool table = p->name == "embed.words" || p->name == "span.width";
    const bool bias = p->name.ends_with(".b");
    if (!table && !bias) continue;
    for (std::size_t k = 0; k < p->value.size(); ++k) p->value[k] = rng.normal(0.0, table ? 1.0 : 0.1);
  }
  const GoldLabels gold = derive_gold_labels(s, tiny.model.max_span_width);
  const Supervision sup = assemble_supervision(s, gold, model, tiny.train);
  const LossWeights w{tiny.train.alpha, tiny.train.beta};
  GradCheckReport rep;
  const auto params = model.params().all();
  rep.parameters = params.size();
  for (const Parameter* p : params) rep.parameter_names.push_back(p->name);
  rep.result = grad_check([&](Tape& tape) { return sentence_loss(tape, s, sup, model, w); }, params);
  return rep;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Span-based recognizer for regular, overlapped and discontinuous entities", "sgner"};
  app.require_subcommand(1);
  Common common;

  SynthSpec synth;
  std::string synth_out, synth_types;
  auto* c_synth = app.add_subcommand("synth", "write a synthetic annotated corpus");
  add_common(c_synth, common, false);
  c_synth->add_option("--out", synth_out, "output JSONL")->required();
  c_synth->add_option("--sentences", synth.sentences);
  c_synth->add_option("--p-overlap", synth.p_overlap);
  c_synth->add_option("--p-discont", synth.p_discont);
  c_synth->add_option("--p-shared", synth.p_shared);
  c_synth->add_option("--min-len", synth.min_len);
  c_synth->add_option("--max-len", synth.max_len);
  c_synth->add_option("--max-constructions", synth.max_constructions);
  c_synth->add_option("--types", synth_types, "comma-separated entity types");
  c_synth->add_option("--vector-dim", synth.vector_dim, "attach per-token vectors of this width");

  std::string train_path, dev_path, model_out, log_path;
  auto* c_train = app.add_subcommand("train", "train a model");
  add_common(c_train, common);
  c_train->add_option("--train", train_path, "training corpus JSONL")->required();
  c_train->add_option("--dev", dev_path, "dev corpus JSONL (defaults to the training corpus)");
  c_train->add_option("--out-model", model_out, "checkpoint path")->required();
  c_train->add_option("--log", log_path, "per-epoch CSV log (default <out-model>.log.csv)");
  c_train->add_option("--ablate", common.ablations, "no_gcn | no_overlap_relation");

  std::string model_in, pred_in, pred_out;
  auto* c_predict = app.add_subcommand("predict", "decode entities with a trained model");
  add_common(c_predict, common, false);
  c_predict->add_option("--model", model_in)->required();
  c_predict->add_option("--in", pred_in)->required();
  c_predict->add_option("--out", pred_out)->required();

  std::string gold_path, pred_path, json_path;
  auto* c_eval = app.add_subcommand("eval", "score predictions against gold annotations");
  add_common(c_eval, common, false);
  c_eval->add_option("--gold", gold_path)->required();
  c_eval->add_option("--pred", pred_path)->required();
  c_eval->add_option("--json", json_path, "also write the report as JSON");

  auto* c_grad = app.add_subcommand("gradcheck", "finite-difference check of all gradients");
  add_common(c_grad, common);
  c_grad->add_option("--ablate", common.ablations, "no_gcn | no_overlap_relation");

  std::string inspect_in;
  std::size_t inspect_width = ModelConfig{}.max_span_width;
  auto* c_inspect = app.add_subcommand("inspect", "print gold span and pair labels");
  add_common(c_inspect, common, false);
  c_inspect->add_option("--in", inspect_in)->required();
  c_inspect->add_option("--max-width", inspect_width);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? kExitOk : kExitUsage;
  }
  for (auto* sub : app.get_subcommands())
    if (sub->count("--seed")) common.seed_given = true;
  const Logger log(err, common.verbose);

  try {
    if (c_synth->parsed()) {
      if (!synth_types.empty()) {
        synth.types.clear();
        std::stringstream ss(synth_types);
        std::string t;
        while (std::getline(ss, t, ','))
          if (!t.empty()) synth.types.push_back(t);
      }
      return cmd_synth(synth, common.seed, synth_out, log);
    }
    if (c_train->parsed()) return cmd_train(common, train_path, dev_path, model_out, log_path, log);
    if (c_predict->parsed()) return cmd_predict(common, model_in, pred_in, pred_out, log);
    if (c_eval->parsed()) return cmd_eval(gold_path, pred_path, json_path, out);
    if (c_grad->parsed()) return cmd_gradcheck(common, out);
    if (c_inspect->parsed()) return cmd_inspect(inspect_in, inspect_width, out);
  } catch (const ConfigError& e) {
    for (const auto& msg : e.errors()) log(Level::error, "config: " + msg);
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    log(Level::error, e.what());
    return kExitUsage;
  } catch (const DataError& e) {
    log(Level::error, e.what());
    return kExitData;
  } catch (const NumericError& e) {
    log(Level::error, e.what());
    return kExitNumeric;
  }
  return kExitUsage;
}

}  // namespace sgner
