#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "starvol/config.hpp"

namespace starvol {

struct RunResult {
  int violations = 0;
  int errors = 0;
  std::vector<std::string> files_written;
};

/// Executes every experiment in the config, writing one CSV per experiment,
/// a summary.txt and the resolved config into output_dir. Deterministic for a
/// fixed (config, master_seed) regardless of worker count.
RunResult run_config(const RunConfig& cfg, std::ostream& log);

/// Canonical float rendering used in every CSV (%.17g, locale-free).
std::string format_double(double v);

}  // namespace starvol
