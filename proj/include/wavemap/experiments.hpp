#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wavemap/evaluate.hpp"

namespace wavemap {

struct RunOptions {
  std::string scale = "desk";  // desk | paper
  int seeds = 3;
  std::uint64_t base_seed = 1;
  std::string outdir = "out";
  std::optional<int> epochs_override;  // shrinks every training phase
  bool quiet = false;
};

struct GateResult {
  std::string gate;         // e.g. "A4"
  std::string description;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;

  std::string line() const;
};

struct ExperimentResult {
  std::string id;
  std::vector<ErrorRow> rows;
  std::vector<GateResult> gates;
  std::vector<std::string> artifacts;
  std::vector<std::string> notes;

  bool all_passed() const;
};

/// Valid ids for run_experiment / the reproduce command.
const std::vector<std::string>& experiment_ids();

/// Chains data generation, training, and evaluation for one experiment and
/// prints one pass/fail line per gate relevant to it.  Seeds run
/// sequentially; the median over seeds feeds every quantitative gate.
ExperimentResult run_experiment(const std::string& id, const RunOptions& options);

}  // namespace wavemap
