#include "sgner/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace sgner {

namespace {

void write_double(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

std::string expect_line(std::istream& in, const std::string& what) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("checkpoint truncated, expected " + what);
  return line;
}

std::size_t header_count(std::istream& in, const std::string& section) {
  std::istringstream ls(expect_line(in, section));
  std::string name;
  std::size_t n = 0;
  if (!(ls >> name >> n) || name != section)
    throw DataError("checkpoint: expected \"" + section + " <count>\"");
  return n;
}

}  // namespace

void write_checkpoint(std::ostream& out, const RunConfig& cfg, const Model& model) {
  out << kCheckpointMagic << '\n';
  const auto kv = cfg.to_map();
  out << "config " << kv.size() << '\n';
  for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
  const auto& words = model.embeddings().vocab().words();
  out << "vocab " << words.size() << '\n';
  for (const auto& w : words) out << nlohmann::json(w).dump() << '\n';
  out << "vector_dim " << model.vector_dim() << '\n';
  const auto params = model.params().all();
  out << "params " << params.size() << '\n';
  for (const Parameter* p : params) {
    out << "param " << p->name << ' ' << p->value.rows() << ' ' << p->value.cols() << '\n';
    for (std::size_t k = 0; k < p->value.size(); ++k) {
      if (k) out << ' ';
      write_double(out, p->value[k]);
    }
    out << '\n';
  }
}

void save_checkpoint(const std::string& path, const RunConfig& cfg, const Model& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint " + path);
  write_checkpoint(out, cfg, model);
}

static LoadedModel read_checkpoint_body(std::istream& in) {
  if (expect_line(in, "header") != kCheckpointMagic)
    throw DataError("not a checkpoint (missing " + std::string(kCheckpointMagic) + " header)");
  LoadedModel lm;
  const std::size_t n_cfg = header_count(in, "config");
  std::ostringstream cfg_text;
  for (std::size_t i = 0; i < n_cfg; ++i) cfg_text << expect_line(in, "config line") << '\n';
  std::istringstream cfg_in(cfg_text.str());
  lm.config = finalize_config(parse_config(cfg_in), {});
  const std::size_t n_vocab = header_count(in, "vocab");
  std::vector<std::string> words;
  for (std::size_t i = 0; i < n_vocab; ++i)
    words.push_back(nlohmann::json::parse(expect_line(in, "vocab word")).get<std::string>());
  if (words.empty() || words.front() != Vocabulary::kUnkToken)
    throw DataError("checkpoint vocabulary must start with " + std::string(Vocabulary::kUnkToken));
  words.erase(words.begin());
  const std::size_t vector_dim = header_count(in, "vector_dim");
  lm.model = std::make_unique<Model>(lm.config.model, Vocabulary(words), vector_dim, 0);
  const std::size_t n_params = header_count(in, "params");
  if (n_params != lm.model->params().size())
    throw DataError("checkpoint has " + std::to_string(n_params) + " parameters, config implies " +
                    std::to_string(lm.model->params().size()));
  for (std::size_t i = 0; i < n_params; ++i) {
    std::istringstream hs(expect_line(in, "param header"));
    std::string tag, name;
    std::size_t rows = 0, cols = 0;
    if (!(hs >> tag >> name >> rows >> cols) || tag != "param")
      throw DataError("checkpoint: malformed parameter header");
    Parameter* p = lm.model->params().find(name);
    if (!p) throw DataError("checkpoint parameter " + name + " not in model");
    if (p->value.rows() != rows || p->value.cols() != cols)
      throw DataError("checkpoint parameter " + name + " is " + std::to_string(rows) + "x" +
                      std::to_string(cols) + ", config implies " + shape_string(p->value));
    std::istringstream vs(expect_line(in, "param values"));
    for (std::size_t k = 0; k < p->value.size(); ++k) {
      std::string tok;
      if (!(vs >> tok)) throw DataError("checkpoint parameter " + name + " is truncated");
      p->value[k] = std::strtod(tok.c_str(), nullptr);
    }
  }
  return lm;
}

LoadedModel read_checkpoint(std::istream& in) {
  try {
    return read_checkpoint_body(in);
  } catch (const ConfigError& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  }
}

LoadedModel load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path);
  return read_checkpoint(in);
}

void copy_parameters(const Model& from, Model& to) {
  for (const Parameter* p : from.params().all()) {
    Parameter& q = to.params().at(p->name);
    if (!q.value.same_shape(p->value)) throw ShapeError("copy_parameters: shape mismatch at " + p->name);
    q.value = p->value;
  }
}

}  // namespace sgner
