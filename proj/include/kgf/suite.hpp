#pragma once

// Randomized verification of the library's theorems. Each check draws its
// own sizes and operators from a sub-seed of (seed, check id, trial), so a
// report depends only on the configuration, never on scheduling.

#include <kgf/instance_gen.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kgf {

struct SizeCaps {
  int max_block_dim = 4;
  std::size_t max_module_rank = 4;
  std::size_t max_index_count = 8;
  std::size_t max_blocks = 3;
};

/// Corrupts the data of exactly one trial; used to test the harness.
struct FaultInjection {
  std::string theorem;
  std::size_t trial = 0;
};

enum class Execution { serial, parallel };

struct SuiteConfig {
  std::size_t trials = 50;
  std::uint64_t seed = 1;
  std::vector<std::string> theorems;  // empty: all
  SizeCaps caps;
  /// Unset: each trial draws its algebra within `caps`.
  std::optional<AlgebraShape> shape = AlgebraShape(std::vector<int>{2, 3});
  Tolerances tol;
  std::optional<FaultInjection> fault;
  Execution execution = Execution::parallel;
};

using Measured = std::vector<std::pair<std::string, double>>;

struct TrialFailure {
  std::size_t trial = 0;
  std::uint64_t trial_seed = 0;
  GenSpec spec;
  std::string reason;
  Measured measured;
  std::optional<ModuleVector> witness;
  /// An expected, self-certifying counterexample of the audited check.
  bool audited = false;
};

struct TrialOutcome {
  enum class Status { pass, fail, skip };
  Status status = Status::pass;
  std::optional<TrialFailure> failure;
};

struct TheoremReport {
  std::string id;
  std::size_t trials = 0;
  std::size_t passes = 0;
  std::size_t skipped = 0;
  std::vector<TrialFailure> failures;
  bool audited = false;
};

/// Identifiers of every check, in report order.
std::span<const std::string_view> theorem_ids();
bool is_audited(std::string_view theorem_id);

/// Throws std::invalid_argument for an unknown id in config.theorems. With
/// zero trials the result is empty.
std::vector<TheoremReport> run_theorem_suite(const SuiteConfig& config);

/// Re-runs one trial exactly as the suite did.
TrialOutcome rerun_trial(const SuiteConfig& config, std::string_view theorem_id, std::size_t trial);

/// Failures outside audited checks, and audited counterexamples.
struct SuiteTally {
  std::size_t hard_failures = 0;
  std::size_t audited_failures = 0;
};
SuiteTally tally(std::span<const TheoremReport> reports);

}  // namespace kgf
