#pragma once

#include <memory>
#include <string>

#include "hyrl/env.hpp"
#include "hyrl/harness.hpp"

namespace hyrl {

struct AppConfig {
  std::string environment = "unit_circle";
  uint64_t seed = 0;
  std::string output_dir = "out";
  PipelineConfig pipeline;
};

struct AppSetup {
  AppConfig config;
  std::unique_ptr<Env> env;
};

// Reads the optional JSON config file (unknown keys anywhere are errors),
// applies the command-line overrides, builds the environment, and fills the
// per-environment pipeline defaults before overlaying the file's values.
AppSetup configure(const std::string& config_path, const std::string& env_override,
                   const std::string& output_override, const uint64_t* seed_override);

// Writes the fully resolved configuration (every effective value).
void save_config_snapshot(const AppConfig& cfg, const std::string& path);

}  // namespace hyrl
