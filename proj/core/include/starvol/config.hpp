#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "starvol/bodies.hpp"
#include "starvol/density.hpp"

namespace starvol {

/// Validated run configuration. Construction rejects unknown keys (reported
/// with their JSON path), missing required keys, and budgets below the
/// suite's mandatory minimums. Experiment entries are kept as canonical JSON
/// text; the runner interprets them.
struct RunConfig {
  int schema_version = 1;
  std::uint64_t master_seed = 1;
  int workers = 0;  // 0: hardware concurrency
  std::string output_dir = "out";
  std::map<std::string, Density> densities;
  std::map<std::string, SupportBody> bodies;
  std::vector<std::string> experiments;  // validated entries, canonical dumps
  std::string config_hash;               // FNV-1a of the canonical resolved dump
  std::string resolved_text;             // canonical resolved config
};

/// Parse + validate JSON text.
RunConfig parse_config_text(const std::string& json_text);

/// Read a config file; overrides are dotted key=value pairs applied before
/// validation (e.g. "master_seed=7", "experiments.0.trials=20000").
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

std::uint64_t fnv1a64(const std::string& text);

}  // namespace starvol
