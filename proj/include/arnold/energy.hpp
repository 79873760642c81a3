#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "arnold/grid.hpp"
#include "arnold/profiles.hpp"

namespace arnold {

enum class EntropyKind { algebraic_kappa, gaussian, custom };
enum class HypVerdict { admissible, borderline, violated };

std::string to_string(HypVerdict v);

/// Entropy pair (Phi, phi = Phi') entering the free energy
/// F(omega) = E(omega) + INT Phi(omega) dx, with the growth-condition
/// constants verified per mass.
struct EntropyFunction {
  EntropyKind kind = EntropyKind::gaussian;
  double kappa = 0.0;
  std::function<double(double)> Phi;        ///< Phi(w), Phi(0) = 0
  std::function<double(double)> phi;        ///< phi(w) = Phi'(w)
  std::function<double(double)> phi_inverse;

  /// Growth-condition constants (C1, C2, C3) at mass M and the verdict:
  /// admissible requires C2 < M/(8 pi) < C3 strictly; equality within
  /// rounding is borderline (extremal case), otherwise violated.
  struct HypConstants {
    double C1 = 0, C2 = 0, C3 = 0;
    HypVerdict verdict = HypVerdict::violated;
  };
  std::function<HypConstants(double)> hyp_constants;  ///< per mass M
};

/// Catalog entries: algebraic_kappa (kappa > 1) and gaussian, built from
/// closed forms; stationarity phi(omega(r)) = psi(r) holds exactly for the
/// matching profile.
EntropyFunction entropy_catalog(EntropyKind kind, double kappa = 0.0);

/// Interaction energy of a radial field by the O(N) cumulative-sum
/// factorization of the -pi INT INT log(max(r,s)) r omega(r) s omega(s)
/// double quadrature sum; exactly equal to the brute-force double sum.
double energy_radial(const Vec& field, const RadialGrid& grid);

/// E = energy_radial(omega_0) + pi sum_{k != 0} INT B_k[omega_k]
///     conj(omega_k) r dr.
double energy_modes(const PolarField& field);

/// Symmetric decreasing rearrangement on the collocation grid via a
/// geometric ladder of level-set areas; mass preserved to 1e-6 relative.
/// Values below -1e-10 are rejected, small negatives are clipped.
Vec rearrange(const PolarField& field);

/// Distribution-function description of a radial profile:
/// hbar(a) = area{omega > a} / pi for level a in (0, m).
struct ConstraintProfile {
  std::function<double(double)> hbar;
  double m = 0.0;   ///< max omega
  double M0 = 0.0;  ///< mass pi INT hbar
};

/// ConstraintProfile of a strictly decreasing profile by monotone bisection.
ConstraintProfile constraint_profile(const Profile& profile, double r_hint);

/// Energy from the constraint profile:
///   (pi/8) INT INT L(hbar(a), hbar(b)) da db + M0^2/(8 pi),
///   L(R, S) = -R S log(max(R, S)) - min(R, S)^2 / 2,
/// factorized into kink-free cumulative one-dimensional integrals on a
/// log-level coordinate. Rejects non-monotone hbar.
double energy_via_h(const ConstraintProfile& cp);

struct FreeEnergyValue {
  double F = 0, E = 0, S = 0;
  double tail_bound = 0;  ///< entropy tail estimate beyond r_max
  bool s_diverged = false;
};

/// F = E + S with S the collocation quadrature of Phi(omega); a divergent
/// negative part is reported as -infinity, not an error.
FreeEnergyValue free_energy(const PolarField& field,
                            const EntropyFunction& entropy);

/// M^2 (1 + log pi)/(8 pi) - E(omega) - (M/(8 pi)) INT omega log(M/omega) dx;
/// nonnegative for every admissible field, zero at the extremal profile.
double log_hls_gap(const PolarField& field);

struct MaximizeResult {
  Vec omega;
  Vec psi;
  Vec residual;  ///< phi(omega) - psi at the nodes
  double F = 0, E = 0, S = 0, M = 0;
  int iterations = 0;
  bool converged = false;
  std::string to_json() const;
  std::string to_csv(const RadialGrid& grid) const;
};

/// Projected ascent for the free energy over radial nonincreasing profiles
/// of fixed mass M: rearranged residual-direction steps with curvature-safe
/// per-node limits, an F-neutral dilation move that centers the profile
/// scale, and mass renormalization; F is nondecreasing along the iteration
/// up to a relative tie tolerance of 1e-11. seed != 0 perturbs the start.
MaximizeResult maximize_free_energy(const EntropyFunction& entropy, double M,
                                    const RadialGrid& grid,
                                    std::uint64_t seed = 0);

}  // namespace arnold
