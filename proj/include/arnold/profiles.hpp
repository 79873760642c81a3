#pragma once

#include <memory>
#include <string>

#include "arnold/numerics.hpp"

namespace arnold {

enum class ProfileKind { gaussian, algebraic, custom };

std::string to_string(ProfileKind k);

/// Radially symmetric, strictly decreasing vortex profile omega(r) together
/// with its induced velocity weight A and the derived potentials used by the
/// quadratic forms:
///   psi' = induced azimuthal stream derivative, A = -psi'/omega',
///   B = 1 + A - A'/r, chi = (1/2) log A,
///   V = chi'' - chi'/r + chi'^2, W = V + 2 chi'/r - B/A.
/// Gaussian and algebraic profiles evaluate closed forms with series
/// fallbacks near the origin; custom profiles interpolate samples.
class Profile {
public:
  ProfileKind kind() const { return kind_; }
  double amplitude() const { return amplitude_; }
  double kappa() const { return kappa_; }
  /// Dilation parameter: this profile evaluates the base family at lambda*r.
  double lambda() const { return lambda_; }
  /// Growth exponent of A(r) ~ r^beta (infinite for the gaussian family).
  double beta() const;
  /// Total mass 2 pi INT omega r dr.
  double mass() const;

  double omega(double r) const;
  double omega_prime(double r) const;
  double psi_prime(double r) const;
  double weight_A(double r) const;
  double weight_A_prime(double r) const;
  double weight_B(double r) const;
  double chi(double r) const;
  double chi_prime(double r) const;
  double weight_V(double r) const;
  double weight_W(double r) const;

  Vec omega(const Vec& r) const;
  Vec omega_prime(const Vec& r) const;
  Vec psi_prime(const Vec& r) const;
  Vec weight_A(const Vec& r) const;
  Vec weight_B(const Vec& r) const;
  Vec weight_V(const Vec& r) const;
  Vec weight_W(const Vec& r) const;

  /// Radius beyond which omega drops below the given floor.
  double support_radius(double floor = 1e-12) const;

  friend Profile gaussian_profile(double amplitude);
  friend Profile algebraic_profile(double kappa, double amplitude);
  friend Profile custom_profile(const Vec& r_samples, const Vec& omega_samples);
  friend Profile rescale(const Profile& base, double lambda);

private:
  // x = r^2 weight-family evaluations of the base (lambda = 1) profile.
  double baseA_x(double x) const;
  double baseA_dx(double x) const;
  double baseA_dxx(double x) const;

  ProfileKind kind_ = ProfileKind::gaussian;
  double amplitude_ = 1.0;
  double kappa_ = 0.0;
  double lambda_ = 1.0;

  // custom profile data
  struct CustomData;
  std::shared_ptr<const CustomData> custom_;
};

Profile gaussian_profile(double amplitude = 1.0);
Profile algebraic_profile(double kappa, double amplitude = 1.0);

/// Monotone interpolation of (r, omega) samples; derived weights come from
/// the interpolant and a sweep-based stream function. The curvature-derived
/// potential V for sampled data depends on the smoothness of the samples
/// and is reported as-is from the interpolant's second derivative.
Profile custom_profile(const Vec& r_samples, const Vec& omega_samples);

/// Profile evaluating the base family at lambda * r:
/// omega_lambda(r) = omega(lambda r), A_lambda(r) = lambda^{-2} A(lambda r).
Profile rescale(const Profile& base, double lambda);

}  // namespace arnold
