#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "stochsync/conditions.hpp"
#include "stochsync/config.hpp"
#include "stochsync/metrics.hpp"

namespace stochsync {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitNumeric = 3,
  kExitInfeasible = 4,
};

/// Certificate for a configured model, plus alternative readings of the
/// constants where the model admits more than one.
struct CheckResult {
  SyncCertificate primary;
  std::vector<std::pair<std::string, SyncCertificate>> alternatives;
  std::vector<std::string> notes;
};

/// Constants are closed-form where known, otherwise sampled; entries in
/// cfg.constants override them (provenance user_supplied).
CheckResult certify(const ExperimentConfig& cfg);

/// K_f for the configured drift and the coupling term sigma*lambda2.
struct DesignInputs {
  double K_f{0};
  Provenance K_f_provenance{Provenance::closed_form};
  double sigma{0};
  double lambda2{0};
};
DesignInputs design_inputs(const ExperimentConfig& cfg);

struct SweepRow {
  double value{0};
  std::uint64_t seed{0};
  double R{0};          // NaN if undefined or the cell failed
  double lyapunov{0};   // NaN if the cell failed
  std::string failure;  // empty on success
};

/// One cell per (value, seed index); cells run on `threads` workers, rows come
/// back value-major in a fixed order. Seed index k uses seed integration.seed + k
/// for every value (common random numbers and initial states).
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, std::size_t threads);

/// Runs `count` jobs on up to `threads` workers. Exceptions escaping a job are rethrown.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& job);

/// Command-line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace stochsync
