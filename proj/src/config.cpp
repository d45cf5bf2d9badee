#include "sgner/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace sgner {

namespace {

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::size_t to_size(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError({key + ": expected a non-negative integer, got \"" + v + "\""});
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError({key + ": expected a number, got \"" + v + "\""});
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  throw ConfigError({key + ": expected on/off, got \"" + v + "\""});
}

std::vector<std::string> to_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ','))
    if (auto t = trim(item); !t.empty()) out.push_back(t);
  return out;
}

std::string fmt_double(double d) {
  std::ostringstream os;
  os.precision(17);
  os << d;
  return os.str();
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error("invalid configuration: " + join(errors, "; ")), errors_(std::move(errors)) {}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "d_emb", "d_h", "d_f", "n_head", "gcn_blocks", "dense_sublayers", "bilstm",
      "embedding_path", "max_span_width", "mlp_layers", "mlp_hidden", "entity_type_set",
      "no_gcn", "alpha", "beta", "lr_encoder", "lr_heads", "patience", "max_epochs", "seed",
      "batch_size", "no_overlap_relation", "negative_keep", "grad_clip"};
  return keys;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  auto& m = model;
  auto& t = train;
  if (key == "d_emb") m.d_emb = to_size(key, value);
  else if (key == "d_h") m.d_h = to_size(key, value);
  else if (key == "d_f") m.d_f = to_size(key, value);
  else if (key == "n_head") m.n_head = to_size(key, value);
  else if (key == "gcn_blocks") m.gcn_blocks = to_size(key, value);
  else if (key == "dense_sublayers") m.dense_sublayers = to_size(key, value);
  else if (key == "bilstm") m.bilstm = to_bool(key, value);
  else if (key == "embedding_path") embedding_path = value;
  else if (key == "max_span_width") m.max_span_width = to_size(key, value);
  else if (key == "mlp_layers") m.mlp_layers = to_size(key, value);
  else if (key == "mlp_hidden") m.mlp_hidden = to_size(key, value);
  else if (key == "entity_type_set") m.entity_types = to_list(value);
  else if (key == "no_gcn") m.no_gcn = to_bool(key, value);
  else if (key == "alpha") t.alpha = to_double(key, value);
  else if (key == "beta") t.beta = to_double(key, value);
  else if (key == "lr_encoder") t.lr_encoder = to_double(key, value);
  else if (key == "lr_heads") t.lr_heads = to_double(key, value);
  else if (key == "patience") t.patience = to_size(key, value);
  else if (key == "max_epochs") t.max_epochs = to_size(key, value);
  else if (key == "seed") t.seed = to_size(key, value);
  else if (key == "batch_size") t.batch_size = to_size(key, value);
  else if (key == "no_overlap_relation") t.no_overlap_relation = to_bool(key, value);
  else if (key == "negative_keep") t.negative_keep = to_double(key, value);
  else if (key == "grad_clip") t.grad_clip = to_double(key, value);
  else throw ConfigError({"unknown key \"" + key + "\""});
}

std::map<std::string, std::string> RunConfig::to_map() const {
  const auto onoff = [](bool b) { return std::string(b ? "on" : "off"); };
  return {
      {"d_emb", std::to_string(model.d_emb)},
      {"d_h", std::to_string(model.d_h)},
      {"d_f", std::to_string(model.d_f)},
      {"n_head", std::to_string(model.n_head)},
      {"gcn_blocks", std::to_string(model.gcn_blocks)},
      {"dense_sublayers", std::to_string(model.dense_sublayers)},
      {"bilstm", onoff(model.bilstm)},
      {"embedding_path", embedding_path},
      {"max_span_width", std::to_string(model.max_span_width)},
      {"mlp_layers", std::to_string(model.mlp_layers)},
      {"mlp_hidden", std::to_string(model.mlp_hidden)},
      {"entity_type_set", join(model.entity_types, ",")},
      {"no_gcn", onoff(model.no_gcn)},
      {"alpha", fmt_double(train.alpha)},
      {"beta", fmt_double(train.beta)},
      {"lr_encoder", fmt_double(train.lr_encoder)},
      {"lr_heads", fmt_double(train.lr_heads)},
      {"patience", std::to_string(train.patience)},
      {"max_epochs", std::to_string(train.max_epochs)},
      {"seed", std::to_string(train.seed)},
      {"batch_size", std::to_string(train.batch_size)},
      {"no_overlap_relation", onoff(train.no_overlap_relation)},
      {"negative_keep", fmt_double(train.negative_keep)},
      {"grad_clip", fmt_double(train.grad_clip)},
  };
}

std::vector<std::string> RunConfig::problems() const {
  std::vector<std::string> p;
  const auto& m = model;
  const auto& t = train;
  if (m.d_emb == 0) p.push_back("d_emb must be positive");
  if (m.d_h == 0) p.push_back("d_h must be positive");
  if (m.bilstm && m.d_h % 2 != 0) p.push_back("d_h must be even when bilstm is on");
  if (!m.no_gcn) {
    if (m.d_f == 0) p.push_back("d_f must be positive");
    if (m.n_head == 0 || m.d_h % m.n_head != 0)
      p.push_back("n_head (" + std::to_string(m.n_head) + ") must divide d_h (" +
                  std::to_string(m.d_h) + ")");
    if (m.gcn_blocks == 0) p.push_back("gcn_blocks must be >= 1");
    if (m.dense_sublayers == 0 || m.d_h % m.dense_sublayers != 0)
      p.push_back("dense_sublayers (" + std::to_string(m.dense_sublayers) +
                  ") must divide d_h (" + std::to_string(m.d_h) + ")");
  }
  if (m.max_span_width == 0) p.push_back("max_span_width must be >= 1");
  if (m.mlp_layers > 0 && m.mlp_hidden == 0) p.push_back("mlp_hidden must be positive");
  if (t.alpha < 0 || t.beta < 0) p.push_back("alpha and beta must be >= 0");
  if (t.alpha == 0 && t.beta == 0) p.push_back("alpha and beta cannot both be 0");
  if (!(t.lr_encoder > 0) || !(t.lr_heads > 0)) p.push_back("learning rates must be positive");
  if (t.patience == 0) p.push_back("patience must be >= 1");
  if (t.batch_size == 0) p.push_back("batch_size must be >= 1");
  if (!(t.negative_keep > 0) || t.negative_keep > 1) p.push_back("negative_keep must be in (0, 1]");
  if (!(t.grad_clip > 0)) p.push_back("grad_clip must be positive");
  return p;
}

RunConfig parse_config(std::istream& in, RunConfig cfg) {
  std::vector<std::string> errors;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(line_no) + ": expected key = value");
      continue;
    }
    try {
      cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      for (const auto& msg : e.errors()) errors.push_back("line " + std::to_string(line_no) + ": " + msg);
    }
  }
  if (!errors.empty()) throw ConfigError(errors);
  return cfg;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file " + path});
  return parse_config(in, std::move(base));
}

RunConfig finalize_config(RunConfig cfg, const std::map<std::string, std::string>& overrides) {
  std::vector<std::string> errors;
  for (const auto& [k, v] : overrides) {
    try {
      cfg.set(k, v);
    } catch (const ConfigError& e) {
      errors.insert(errors.end(), e.errors().begin(), e.errors().end());
    }
  }
  auto more = cfg.problems();
  errors.insert(errors.end(), more.begin(), more.end());
  if (!errors.empty()) throw ConfigError(errors);
  return cfg;
}

void write_config(std::ostream& out, const RunConfig& cfg) {
  for (const auto& [k, v] : cfg.to_map()) out << k << " = " << v << '\n';
}

}  // namespace sgner
