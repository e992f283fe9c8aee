#pragma once

#include <complex>
#include <string>
#include <string_view>

namespace nef {

enum class FamilyTag { Gamma, InverseGaussian, Ghs };

/// Unit-mean exponential-family latent W with density
///   exp{phi [w xi0 - b(xi0)] + d(phi) + phi g(w) + h(w)},  w > 0.
///
/// Gamma: shape phi, rate phi. InverseGaussian: mean 1, shape phi.
/// Ghs (generalized hyperbolic secant) carries b and its derivatives only.
class MixingFamily {
 public:
  static MixingFamily gamma() { return MixingFamily(FamilyTag::Gamma); }
  static MixingFamily inverse_gaussian() {
    return MixingFamily(FamilyTag::InverseGaussian);
  }
  static MixingFamily ghs() { return MixingFamily(FamilyTag::Ghs); }

  /// "gamma" | "ig" | "ghs"
  static MixingFamily from_name(std::string_view name);

  FamilyTag tag() const { return tag_; }
  std::string_view name() const;
  /// Throws UnsupportedFamily for GHS.
  void require_density(std::string_view op) const;

  double xi0() const;
  double b(double theta) const;
  std::complex<double> b(std::complex<double> theta) const;
  double b2() const;  // b''(xi0)
  double b3() const;  // b'''(xi0)
  double b4() const;  // b''''(xi0)

  // The following need a density (Gamma or InverseGaussian).
  double d(double phi) const;
  double d1(double phi) const;
  double d2(double phi) const;
  double g(double w) const;
  double h(double w) const;
  /// Inverse of d'. Gamma: defined for x > 1; InverseGaussian: x > 0.
  double d1_inverse(double x) const;

  friend bool operator==(const MixingFamily&, const MixingFamily&) = default;

 private:
  explicit MixingFamily(FamilyTag tag) : tag_(tag) {}
  FamilyTag tag_;
};

}  // namespace nef
