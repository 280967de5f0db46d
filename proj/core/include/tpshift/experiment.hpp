#pragma once

// Seeded sign-retrieval trials across sampling densities.

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tpshift/generator.hpp"
#include "tpshift/sigret.hpp"

namespace tpshift {

struct ExperimentConfig {
  GeneratorParams generator;
  std::vector<double> densities;
  int trials = 0;
  std::uint64_t seed = 0;
  Support support{0, 19};
  std::array<double, 2> window{-2.0, 21.0};
  int max_changes = -1;  // < 0: ceil(window length) + 2
  double noise = 0.0;    // relative magnitude noise; no accuracy claims when > 0
  bool paired = false;   // add a near-duplicate of every sample point
  double jitter = 0.25;  // in units of the lattice spacing 1/d
  double success_rel = 1e-4;
  double check_step = 0.01;

  // Throws Errc::kConfig on invalid fields.
  void validate() const;
  int effective_max_changes() const;
};

enum class TrialOutcome { kSuccess, kMismatch, kRankDeficient, kBudgetExhausted, kOtherError };

std::string to_string(TrialOutcome outcome);

struct TrialRecord {
  double density = 0.0;
  int trial = 0;
  std::size_t samples = 0;
  TrialOutcome outcome = TrialOutcome::kOtherError;
  double residual = 0.0;     // RMS fit residual, when the solver returned
  double error = 0.0;        // min(max|fhat - f|, max|fhat + f|) / max|f|
  long sign_changes = 0;
  long nodes = 0;
};

struct DensitySummary {
  double density = 0.0;
  int trials = 0;
  int successes = 0;
  double mean_residual = 0.0;  // over trials where the solver returned
  int rank_deficient = 0;
  int budget_exhausted = 0;

  double success_rate() const { return trials > 0 ? static_cast<double>(successes) / trials : 0.0; }
};

struct ExperimentReport {
  std::vector<DensitySummary> summaries;
  std::vector<TrialRecord> trials;
};

// Independent stream per (seed, density index, trial index).
std::mt19937_64 trial_stream(std::uint64_t seed, std::size_t density_index, std::size_t trial_index);

// Uniform on [0, 1) from the top 53 bits; identical on every platform.
double uniform01(std::mt19937_64& rng);

// Points (j + 1/2)/d + jitter * u/d, u uniform in [-1, 1), inside the window.
// With paired set, each point gains a neighbour within 0.01/d.
PointSet jittered_lattice(double density, std::array<double, 2> window, double jitter,
                          bool paired, std::mt19937_64& rng);

// Trials run in parallel; every trial draws from its own stream keyed by
// (seed, density index, trial index), so the report does not depend on
// scheduling.
ExperimentReport run_threshold_experiment(const ExperimentConfig& config);

}  // namespace tpshift
