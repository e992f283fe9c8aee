#pragma once

// Mixed-Poisson counts N ~ MP(lambda, W_phi) and the normalized random sum
//   S = lambda^{-1/2} sum_{i<=N} (X_i + mu (lambda^{-1/2} - 1)),
// whose weak limit as lambda -> infinity is NEF(mu, sigma2, phi).

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nef/family.hpp"
#include "nef/nef.hpp"
#include "nef/rng.hpp"

namespace nef {

/// Gamma latent gives negative binomial counts, IG latent gives PIG counts.
struct MpCountParams {
  double lambda = 1.0;
  double phi = 1.0;
  MixingFamily family = MixingFamily::gamma();

  void validate() const;
};

/// i.i.d. summand law with its mean and variance.
class SummandSpec {
 public:
  using Sampler = std::function<double(Rng&)>;

  static SummandSpec exponential(double mean);
  static SummandSpec normal(double mu, double sigma2);
  static SummandSpec custom(std::string label, double mu, double sigma2,
                            Sampler sampler);
  /// "exp:MEAN" or "normal:MU,SIGMA2".
  static SummandSpec parse(const std::string& text);

  double mu() const { return mu_; }
  double sigma2() const { return sigma2_; }
  const std::string& label() const { return label_; }
  double draw(Rng& rng) const { return sampler_(rng); }

 private:
  SummandSpec(std::string label, double mu, double sigma2, Sampler sampler);
  std::string label_;
  double mu_;
  double sigma2_;
  Sampler sampler_;
};

double mp_pmf(const MpCountParams& c, std::uint64_t n);
double mp_log_pmf(const MpCountParams& c, std::uint64_t n);
/// Poisson-mixture integral by quadrature (any latent with a density).
double mp_log_pmf_mixture(const MpCountParams& c, std::uint64_t n);

std::uint64_t sample_mp_count(const MpCountParams& c, Rng& rng);

double sample_normalized_sum(const MpCountParams& c, const SummandSpec& s,
                             Rng& rng);

/// `replicas` draws of the normalized sum, replica r using stream_for(seed, r).
std::vector<double> sample_normalized_sums(const MpCountParams& c,
                                           const SummandSpec& s,
                                           std::size_t replicas,
                                           std::uint64_t seed);

/// NEF CDF at each point of an ascending sequence, by quadrature of nef_pdf.
std::vector<double> nef_cdf_sorted(const NefParams& p, const MixingFamily& fam,
                                   std::span<const double> sorted);
double nef_cdf(const NefParams& p, const MixingFamily& fam, double y);

/// Kolmogorov-Smirnov distance between the sample's ECDF and the NEF CDF.
double ks_distance(std::span<const double> sample, const NefParams& p,
                   const MixingFamily& fam);

}  // namespace nef
