#pragma once

// Monte Carlo study of the MM-initialized EM estimator: per-replica fits
// on independent streams, aggregated into empirical and theoretical SEs.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nef/estimation.hpp"
#include "nef/family.hpp"
#include "nef/nef.hpp"

namespace nef {

struct StudyConfig {
  MixingFamily family = MixingFamily::gamma();
  NefParams truth{3.0, 4.0, 2.0};
  std::size_t n = 1000;
  std::size_t replicas = 1000;
  std::uint64_t seed = 1;
  EmOptions em;
};

enum class ReplicaStatus { Ok, MmInadmissible, FitFailed };

struct ReplicaOutcome {
  ReplicaStatus status = ReplicaStatus::Ok;
  NefParams estimate;
  std::optional<StdErrors> std_errors;
  bool mm_multiple_roots = false;
  bool converged = false;
  int iterations = 0;
  int monotonicity_violations = 0;  // trace drops larger than 1e-8
  std::string error;
};

struct ParameterSummary {
  double truth = 0.0;
  double mean = 0.0;
  double bias = 0.0;
  std::optional<double> empirical_sd;  // needs two fitted replicas
  std::optional<double> mean_std_error;
};

struct StudySummary {
  std::size_t requested = 0;
  std::size_t used = 0;
  std::size_t discarded_mm_inadmissible = 0;
  std::size_t discarded_fit_failed = 0;
  std::size_t std_errors_unavailable = 0;  // kept for SDs, left out of SE means
  std::size_t mm_multiple_roots = 0;
  std::size_t not_converged = 0;
  std::size_t monotonicity_violations = 0;
  double mm_inadmissible_rate = 0.0;
  std::array<ParameterSummary, 3> params;  // mu, sigma2, phi
};

/// Replica `index` draws from stream_for(seed, index).
ReplicaOutcome run_replica(const StudyConfig& cfg, std::size_t index);

/// OpenMP over replicas.
std::vector<ReplicaOutcome> run_replicas(const StudyConfig& cfg);
/// Serial reference for run_replicas.
std::vector<ReplicaOutcome> run_replicas_serial(const StudyConfig& cfg);

StudySummary summarize(const StudyConfig& cfg,
                       const std::vector<ReplicaOutcome>& outcomes);

}  // namespace nef
