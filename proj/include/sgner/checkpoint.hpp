#pragma once

// Checkpoint file: a versioned text header "SGNER1" followed by the run
// configuration, vocabulary and every parameter as name, shape and values
// (printed with 17 significant digits, so values round-trip exactly).

#include <iosfwd>
#include <memory>
#include <string>

#include "sgner/config.hpp"
#include "sgner/model.hpp"

namespace sgner {

inline constexpr const char* kCheckpointMagic = "SGNER1";

struct LoadedModel {
  RunConfig config;
  std::unique_ptr<Model> model;
};

void write_checkpoint(std::ostream& out, const RunConfig& cfg, const Model& model);
void save_checkpoint(const std::string& path, const RunConfig& cfg, const Model& model);
LoadedModel read_checkpoint(std::istream& in);
LoadedModel load_checkpoint(const std::string& path);

/// Copies parameter values between two models with identical layouts.
void copy_parameters(const Model& from, Model& to);

}  // namespace sgner
