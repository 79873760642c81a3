#pragma once

#include <map>
#include <string>
#include <utility>

#include "arnold/grid.hpp"
#include "arnold/profiles.hpp"

namespace arnold {

enum class OperatorKind { hardy_B, btilde1, L_k, kernel_K, generalized_L0 };

std::string to_string(OperatorKind k);

/// Result of an eigenvalue computation: sorted eigenvalues, normalized
/// eigenfunctions (sign fixed positive at the first extremum), derived
/// named scalars, the resolution used, and a convergence flag from an
/// (N, 2N) doubling study (each reported eigenvalue must move by less
/// than 1e-4 relative).
struct SpectralReport {
  OperatorKind op = OperatorKind::hardy_B;
  int k = 0;  ///< angular index for L_k reports
  Vec eigenvalues;
  Vec abscissae;                      ///< nodes carrying the eigenfunctions
  std::vector<Vec> eigenfunctions;
  std::map<std::string, double> derived;
  std::size_t N = 0;
  double r_max = 0.0;
  bool converged = false;

  std::string to_json() const;
};

/// Weighted Hardy constant C_H = 1/lambda_min of the operator
/// h -> -d/dx(B(x) dh/dx), B(x) = e^{-2x} A(e^x), with Dirichlet ends on a
/// log-radius interval chosen so B stays below an overflow cap. Derived
/// entries: C_H, lambda_min. Eigenfunction 0 is the minimizer h(log r).
SpectralReport hardy_constant(const Profile& profile, const RadialGrid& grid);

enum class HardyOrdering { less_than_one, equal_one, greater_than_one, indeterminate };
std::string to_string(HardyOrdering o);

/// Sign test of the potential V on the grid: V > 0 everywhere implies
/// C_H < 1, V < 0 implies C_H > 1, V == 0 implies C_H = 1.
HardyOrdering vsign_hardy_check(const Profile& profile, const RadialGrid& grid);

/// Largest eigenvalues of the symmetrized first-mode Biot-Savart operator
/// with kernel (1/2) min(r/s, s/r) A(r)^{-1/2} A(s)^{-1/2}. Derived entries:
/// spectral_radius, lambda2, gap (= 1 - lambda2), C1prime (largest
/// eigenvalue on the orthogonal complement of the mass direction A^{-1/2}).
SpectralReport btilde1_spectrum(const Profile& profile, const RadialGrid& grid);

/// g = B_k[f] for k != 0 by two cumulative sweeps of the split kernel.
Vec bk_apply(int k, const Vec& f, const RadialGrid& grid);
CVec bk_apply(int k, const CVec& f, const RadialGrid& grid);

/// Lowest eigenvalues of L_k = -(1/r) d/dr (r d/dr) + k^2/r^2 + W in
/// L^2(r dr), for the gaussian weight family. Derived entries: mu0, mu1.
SpectralReport lk_spectrum(int k, const RadialGrid& grid);

/// Spectrum of the Hilbert-Schmidt kernel
///   -log(max(r,s)) A(r)^{-1/2} A(s)^{-1/2} (+ log(lambda) rank-one dilation
/// correction); derived: top eigenvalue and index = #{eigenvalues > 1}.
SpectralReport kernel_index(const Profile& profile, const RadialGrid& grid,
                            double lambda = 1.0);

/// Lowest eigenvalues mu of the pencil L_0 g = mu A^{-1} g (gaussian
/// weights); mu = 1 with eigenfunction psi-bar' is an exact member.
SpectralReport generalized_L0(const RadialGrid& grid);

/// Quasimode study of the lowest radial eigenvalue: g = c e^chi e^{-r^2/4},
/// c = (2 log 2)^{-1/2}; residual R = (3/4 - (B-1)/A) g; overlap with
/// psi = (sqrt(3)/pi) e^{-chi}. Derived entries: eps (= ||R||), norm_R_sq,
/// overlap, mu0_lower, mu0_upper, delta, min_R.
SpectralReport quasimode_analysis(const RadialGrid& grid);

/// (a + b) * overlap^2 - a; rejects a + b < 0.
double coercivity_bound(double a, double b, double overlap);

/// Two-sided bounds for the second radial eigenvalue from the pointwise
/// Rayleigh quotient of the trial f = e^{-s}(1 - alpha s)(1 + beta s),
/// s = r^2/4; beta = 0 for the basic trial, else beta(alpha) chosen so the
/// quotient's numerator vanishes with the trial's zero. Returns
/// (min, max) over nodes. Throws if the numerator fails to vanish at the
/// trial's sign change.
std::pair<double, double> rayleigh_mu1_bounds(double alpha, bool use_improved,
                                              const RadialGrid& grid);

/// beta(alpha) for the improved Rayleigh trial.
double rayleigh_beta(double alpha);

}  // namespace arnold
