#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace arnold {

using Vec = std::vector<double>;
using Cplx = std::complex<double>;
using CVec = std::vector<Cplx>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

/// Composite Simpson weights for n uniformly spaced nodes with spacing h.
/// An odd interval count is handled with a 3/8 rule on the final three
/// intervals, so the rule stays fourth-order for any n >= 2.
Vec simpson_weights(std::size_t n, double h);

// ---------------------------------------------------------------------------
// Tridiagonal linear algebra
// ---------------------------------------------------------------------------

/// Prefactored tridiagonal solver (Thomas algorithm without pivoting).
/// Suitable for the diagonally dominant systems produced by implicit
/// diffusion steps; reusable across many right-hand sides.
class TridiagFactor {
public:
  TridiagFactor() = default;
  /// lower/upper have size n-1, diag has size n.
  TridiagFactor(const Vec& lower, const Vec& diag, const Vec& upper);
  void solve(Vec& rhs) const;
  void solve(CVec& rhs) const;
  std::size_t size() const { return inv_piv_.size(); }

private:
  Vec lower_, upper_, inv_piv_;
};

/// Number of eigenvalues of the symmetric tridiagonal matrix (diag, off)
/// that are strictly below x, by the Sturm sequence of LDL^T pivots.
int sturm_count_below(const Vec& diag, const Vec& off, double x);

/// Lowest n_eig eigenvalues of a symmetric tridiagonal matrix by bisection
/// with an eigenvalue-relative stopping tolerance.
Vec tridiag_lowest_eigenvalues(const Vec& diag, const Vec& off, int n_eig,
                               double rel_tol = 1e-13);

/// Eigenvector for a known isolated eigenvalue, by inverse iteration.
/// Returned vector has unit Euclidean norm.
Vec tridiag_eigenvector(const Vec& diag, const Vec& off, double lambda);

/// Number of eigenvalues mu of the pencil T g = mu M g strictly below x,
/// where T is symmetric tridiagonal and M = diag(mdiag) is positive.
/// Counted from the pivot signs of T - x M, which avoids forming
/// M^{-1/2} T M^{-1/2} when mdiag spans many decades.
int pencil_count_below(const Vec& diag, const Vec& off, const Vec& mdiag,
                       double x);

/// Lowest n_eig pencil eigenvalues by inertia bisection.
Vec pencil_lowest_eigenvalues(const Vec& diag, const Vec& off,
                              const Vec& mdiag, int n_eig,
                              double rel_tol = 1e-12);

/// Pencil eigenvector by inverse iteration on (T - lambda M).
Vec pencil_eigenvector(const Vec& diag, const Vec& off, const Vec& mdiag,
                       double lambda);

// ---------------------------------------------------------------------------
// Kernel sweeps (product integration on a fixed node set)
// ---------------------------------------------------------------------------

/// Applies the half-line kernel operator
///   (B_k f)(r) = (1/2k) [ r^{-k} I(r) + r^{k} O(r) ],
///   I(r) = INT_0^r s^{k+1} f(s) ds,  O(r) = INT_r^rmax s^{1-k} f(s) ds,
/// at every node of the strictly increasing abscissa vector r, for k >= 1.
/// Each interval integral uses Gauss-Legendre points on the local cubic
/// interpolant of f, and the sweeps carry ratio-scaled accumulators so no
/// intermediate overflows for large k or wide domains.
Vec bk_sweep(const Vec& r, const Vec& f, int k);

/// Cumulative mass and log-weighted tail integrals used by stream functions:
///   C(r_i) = INT_0^{r_i} s f(s) ds,   D(r_i) = INT_{r_i}^{rmax} s log(s) f(s) ds.
void stream_sweeps(const Vec& r, const Vec& f, Vec& C, Vec& D);

/// Radial stream function psi with Laplacian(psi) = f:
/// psi(r) = log(r) C(r) + D(r); psi'(r) = C(r)/r.
Vec stream_function(const Vec& r, const Vec& f);

/// Plain cumulative integral P(r_i) = INT_0^{r_i} g(s) ds by the same
/// per-interval cubic product integration.
Vec cumulative_integral(const Vec& r, const Vec& g);

// ---------------------------------------------------------------------------
// Interpolation
// ---------------------------------------------------------------------------

/// Shape-preserving piecewise-cubic interpolation (Fritsch-Carlson slopes).
class Pchip {
public:
  Pchip() = default;
  Pchip(Vec x, Vec y);
  double eval(double x) const;
  double deriv(double x) const;
  double deriv2(double x) const;
  const Vec& abscissae() const { return x_; }
  const Vec& values() const { return y_; }

private:
  std::size_t interval(double x) const;
  Vec x_, y_, d_;
};

/// Piecewise-linear interpolation with constant extrapolation.
double lin_interp(const Vec& x, const Vec& y, double xq);

// ---------------------------------------------------------------------------
// FFT
// ---------------------------------------------------------------------------

/// In-place radix-2 FFT; n must be a power of two. The inverse transform
/// includes the 1/n normalization.
void fft_pow2(CVec& a, bool inverse);

/// Real angular samples v_j = Re sum_{|k| <= K} c_k exp(i k theta_j) on m
/// uniform angles theta_j = 2 pi j / m, where modes holds c_0..c_K and the
/// negative modes are the hermitian mirror c_{-k} = conj(c_k). m must be a
/// power of two with m > 2 K.
Vec angular_synthesis(const CVec& modes, std::size_t m);

/// Inverse of angular_synthesis: c_k = (1/m) sum_j v_j exp(-i k theta_j)
/// for k = 0..k_max.
CVec angular_analysis(const Vec& values, int k_max);

/// Smallest power of two >= max(16, 4 k): the collocation count that keeps
/// quadratic and cubic mode products alias-free for modes up to k.
std::size_t collocation_count(int k);

// ---------------------------------------------------------------------------
// Threading
// ---------------------------------------------------------------------------

/// Worker count from the ARNOLD_LAB_THREADS environment variable (default 1).
int num_threads();

/// Splits [0, n) into contiguous chunks executed on num_threads() workers.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace arnold
