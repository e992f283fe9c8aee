#pragma once

// Parameter estimation for NEF laws: method of moments, EM with GIG
// posterior expectations, and Louis observed information.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nef/family.hpp"
#include "nef/nef.hpp"

namespace nef {

/// Posterior expectations of the latent W for one observation.
struct EStepRecord {
  double alpha = 0.0;    // E[W | y]
  double gamma = 0.0;    // E[1/W | y]
  double delta = 0.0;    // E[g(W) | y]
  double lambda2 = 0.0;  // E[W^2 | y]
  double tau = 0.0;      // E[W g(W) | y]
  double nu = 0.0;       // E[g(W)^2 | y]
  double rho = 0.0;      // E[1/W^2 | y]
  double varphi = 0.0;   // E[g(W) / W | y]
};

enum class FitMethod { MM, EM, NormalMLE };
std::string_view to_string(FitMethod m);

using StdErrors = std::array<double, 3>;  // (mu, sigma2, phi)

struct FitResult {
  NefParams params;
  std::optional<StdErrors> std_errors;  // empty when the information is singular
  std::vector<double> loglik_trace;
  int iterations = 0;
  bool converged = false;
  FitMethod method = FitMethod::EM;
  NefParams init;                 // EM starting point
  bool init_from_moments = true;  // false when MM was inadmissible
};

struct SampleMoments {
  double m1 = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;

  static SampleMoments of(std::span<const double> data);
};

struct MomentEstimate {
  NefParams params;
  bool multiple_roots = false;  // both quadratic roots were admissible
};

/// Throws InadmissibleEstimate when no root gives phi > 0 and sigma2 > 0.
MomentEstimate method_of_moments(const SampleMoments& m, const MixingFamily& fam);
MomentEstimate method_of_moments(std::span<const double> data,
                                 const MixingFamily& fam);

/// One observation. `full` adds lambda2, tau, nu, rho, varphi.
EStepRecord e_step_record(double y, const NefParams& p, const MixingFamily& fam,
                          bool full);

/// OpenMP over observations.
std::vector<EStepRecord> e_step(std::span<const double> data, const NefParams& p,
                                const MixingFamily& fam, bool full);
/// Serial reference for e_step.
std::vector<EStepRecord> e_step_serial(std::span<const double> data,
                                       const NefParams& p,
                                       const MixingFamily& fam, bool full);

NefParams m_step(std::span<const double> data,
                 std::span<const EStepRecord> estep, const MixingFamily& fam);

struct EmOptions {
  double epsilon = 1e-4;
  int max_iter = 500;
  std::optional<NefParams> init;  // default: method of moments
  bool standard_errors = true;
};

/// Throws std::runtime_error (wrapping MStepDomainError) with the iteration
/// number if an M-step fails.
FitResult em_fit(std::span<const double> data, const MixingFamily& fam,
                 const EmOptions& options = {});

struct ObservedInformation {
  Eigen::Matrix3d matrix = Eigen::Matrix3d::Zero();
  bool singular = false;

  /// sqrt(diag(I^{-1})) when I is positive definite.
  std::optional<StdErrors> std_errors() const;
};

/// Louis: E[-d2 lc | y] - E[S S^T | y] + E[S | y] E[S | y]^T with S the
/// complete-data score, parameter order (mu, sigma2, phi). The last term
/// vanishes at the MLE; keeping it makes the identity hold everywhere.
ObservedInformation observed_information(std::span<const double> data,
                                         const NefParams& p,
                                         const MixingFamily& fam);

double loglik(std::span<const double> data, const NefParams& p,
              const MixingFamily& fam);

/// Normal MLE baseline (phi = +inf).
FitResult normal_mle(std::span<const double> data);

}  // namespace nef
