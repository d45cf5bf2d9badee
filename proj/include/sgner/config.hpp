#pragma once

// Run configuration: one flat key=value namespace shared by every module.
// Defaults follow the CLEF column of the published hyper-parameter table
// (d_h 400 via a BiLSTM, d_f 20, 4 heads, 2 GCN blocks, one 150-unit MLP
// layer, alpha = beta = 1.0).

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace sgner {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

struct ModelConfig {
  std::size_t d_emb = 100;
  std::size_t d_h = 400;
  std::size_t d_f = 20;
  std::size_t n_head = 4;
  std::size_t gcn_blocks = 2;
  std::size_t dense_sublayers = 2;
  bool bilstm = true;
  std::size_t max_span_width = 8;
  std::size_t mlp_layers = 1;
  std::size_t mlp_hidden = 150;
  bool no_gcn = false;
  /// Empty means "collect from the training corpus".
  std::vector<std::string> entity_types;
};

struct TrainConfig {
  double alpha = 1.0;
  double beta = 1.0;
  double lr_encoder = 1e-3;
  double lr_heads = 1e-3;
  std::size_t patience = 15;
  std::size_t max_epochs = 200;
  std::uint64_t seed = 1;
  std::size_t batch_size = 8;
  bool no_overlap_relation = false;
  /// Keep each negative span with this probability; 1 keeps all (off).
  double negative_keep = 1.0;
  /// Global gradient-norm cap.
  double grad_clip = 5.0;
};

struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  std::string embedding_path;

  /// Sets one key; throws ConfigError on unknown key or malformed value.
  void set(const std::string& key, const std::string& value);
  std::map<std::string, std::string> to_map() const;
  /// Every violated constraint; empty when consistent.
  std::vector<std::string> problems() const;
};

/// All recognized keys.
const std::vector<std::string>& config_keys();

/// Parses "key = value" lines ('#' starts a comment). Collects every bad
/// line and unknown key before throwing.
RunConfig parse_config(std::istream& in, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});
/// Applies overrides, then validates; throws ConfigError listing all problems.
RunConfig finalize_config(RunConfig cfg, const std::map<std::string, std::string>& overrides);

void write_config(std::ostream& out, const RunConfig& cfg);

}  // namespace sgner
