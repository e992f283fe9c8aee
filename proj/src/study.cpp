#include "nef/study.hpp"

#include <cmath>
#include <cstdint>
#include <exception>

#include "nef/errors.hpp"
#include "nef/rng.hpp"
#include "first_error.hpp"

namespace nef {

ReplicaOutcome run_replica(const StudyConfig& cfg, std::size_t index) {
  ReplicaOutcome out;
  Rng rng = stream_for(cfg.seed, index);
  const std::vector<double> data = sample_nef(cfg.truth, cfg.family, cfg.n, rng);

  EmOptions opts = cfg.em;
  try {
    const MomentEstimate mm = method_of_moments(data, cfg.family);
    out.mm_multiple_roots = mm.multiple_roots;
    opts.init = mm.params;
  } catch (const InadmissibleEstimate& e) {
    out.status = ReplicaStatus::MmInadmissible;
    out.error = e.what();
    return out;
  }

  try {
    const FitResult fit = em_fit(data, cfg.family, opts);
    out.estimate = fit.params;
    out.std_errors = fit.std_errors;
    out.converged = fit.converged;
    out.iterations = fit.iterations;
    for (std::size_t k = 1; k < fit.loglik_trace.size(); ++k) {
      if (fit.loglik_trace[k] < fit.loglik_trace[k - 1] - 1e-8) ++out.monotonicity_violations;
    }
  } catch (const std::exception& e) {
    out.status = ReplicaStatus::FitFailed;
    out.error = e.what();
  }
  return out;
}

std::vector<ReplicaOutcome> run_replicas(const StudyConfig& cfg) {
  std::vector<ReplicaOutcome> out(cfg.replicas);
  const auto total = static_cast<std::int64_t>(cfg.replicas);
  detail::FirstError failure;
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t r = 0; r < total; ++r) {
    try {
      out[static_cast<std::size_t>(r)] = run_replica(cfg, static_cast<std::size_t>(r));
    } catch (...) {
      failure.capture();
    }
  }
  failure.rethrow();
  return out;
}

std::vector<ReplicaOutcome> run_replicas_serial(const StudyConfig& cfg) {
  std::vector<ReplicaOutcome> out;
  out.reserve(cfg.replicas);
  for (std::size_t r = 0; r < cfg.replicas; ++r) out.push_back(run_replica(cfg, r));
  return out;
}

StudySummary summarize(const StudyConfig& cfg,
                       const std::vector<ReplicaOutcome>& outcomes) {
  StudySummary s;
  s.requested = outcomes.size();
  const double truth[3] = {cfg.truth.mu, cfg.truth.sigma2, cfg.truth.phi};
  double sum[3] = {0, 0, 0};
  double sum_se[3] = {0, 0, 0};
  std::size_t with_se = 0;

  for (const ReplicaOutcome& o : outcomes) {
    if (o.status == ReplicaStatus::MmInadmissible) {
      ++s.discarded_mm_inadmissible;
      continue;
    }
    if (o.status == ReplicaStatus::FitFailed) {
      ++s.discarded_fit_failed;
      continue;
    }
    ++s.used;
    if (o.mm_multiple_roots) ++s.mm_multiple_roots;
    if (!o.converged) ++s.not_converged;
    s.monotonicity_violations += static_cast<std::size_t>(o.monotonicity_violations);
    const double est[3] = {o.estimate.mu, o.estimate.sigma2, o.estimate.phi};
    for (int j = 0; j < 3; ++j) sum[j] += est[j];
    if (o.std_errors) {
      ++with_se;
      for (int j = 0; j < 3; ++j) sum_se[j] += (*o.std_errors)[static_cast<std::size_t>(j)];
    } else {
      ++s.std_errors_unavailable;
    }
  }
  if (s.requested > 0) {
    s.mm_inadmissible_rate = static_cast<double>(s.discarded_mm_inadmissible) /
                             static_cast<double>(s.requested);
  }

  for (int j = 0; j < 3; ++j) {
    ParameterSummary& ps = s.params[static_cast<std::size_t>(j)];
    ps.truth = truth[j];
    if (s.used == 0) continue;
    ps.mean = sum[j] / static_cast<double>(s.used);
    ps.bias = ps.mean - truth[j];
    if (with_se > 0) ps.mean_std_error = sum_se[j] / static_cast<double>(with_se);
  }
  if (s.used >= 2) {
    double ss[3] = {0, 0, 0};
    for (const ReplicaOutcome& o : outcomes) {
      if (o.status != ReplicaStatus::Ok) continue;
      const double est[3] = {o.estimate.mu, o.estimate.sigma2, o.estimate.phi};
      for (int j = 0; j < 3; ++j) {
        const double d = est[j] - s.params[static_cast<std::size_t>(j)].mean;
        ss[j] += d * d;
      }
    }
    for (int j = 0; j < 3; ++j) {
      s.params[static_cast<std::size_t>(j)].empirical_sd =
          std::sqrt(ss[j] / static_cast<double>(s.used - 1));
    }
  }
  return s;
}

}  // namespace nef
