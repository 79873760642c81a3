#include "arnold/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace arnold {

Vec simpson_weights(std::size_t n, double h) {
  if (n < 2) throw std::invalid_argument("simpson_weights: need n >= 2");
  if (!(h > 0)) throw std::invalid_argument("simpson_weights: need h > 0");
  Vec w(n, 0.0);
  const std::size_t m = n - 1;  // interval count
  if (m == 1) {
    w[0] = w[1] = h / 2;
    return w;
  }
  std::size_t head = m;
  if (m % 2 == 1) head = (m >= 3) ? m - 3 : 0;
  if (head > 0) {
    w[0] += h / 3;
    w[head] += h / 3;
    for (std::size_t i = 1; i < head; i += 2) w[i] += 4 * h / 3;
    for (std::size_t i = 2; i < head; i += 2) w[i] += 2 * h / 3;
  }
  if (head != m) {  // 3/8 rule on the last three intervals
    w[head] += 3 * h / 8;
    w[head + 1] += 9 * h / 8;
    w[head + 2] += 9 * h / 8;
    w[head + 3] += 3 * h / 8;
  }
  return w;
}

// ---------------------------------------------------------------------------
// Tridiagonal linear algebra
// ---------------------------------------------------------------------------

TridiagFactor::TridiagFactor(const Vec& lower, const Vec& diag,
                             const Vec& upper) {
  const std::size_t n = diag.size();
  if (lower.size() != n - 1 || upper.size() != n - 1)
    throw std::invalid_argument("TridiagFactor: size mismatch");
  lower_ = lower;
  upper_.resize(n - 1);
  inv_piv_.resize(n);
  double piv = diag[0];
  if (piv == 0) throw std::runtime_error("TridiagFactor: zero pivot");
  inv_piv_[0] = 1.0 / piv;
  for (std::size_t i = 1; i < n; ++i) {
    upper_[i - 1] = upper[i - 1] * inv_piv_[i - 1];
    piv = diag[i] - lower[i - 1] * upper_[i - 1];
    if (piv == 0) throw std::runtime_error("TridiagFactor: zero pivot");
    inv_piv_[i] = 1.0 / piv;
  }
}

void TridiagFactor::solve(Vec& rhs) const {
  const std::size_t n = inv_piv_.size();
  if (rhs.size() != n) throw std::invalid_argument("TridiagFactor: rhs size");
  for (std::size_t i = 1; i < n; ++i)
    rhs[i] -= lower_[i - 1] * rhs[i - 1] * inv_piv_[i - 1];
  rhs[n - 1] *= inv_piv_[n - 1];
  for (std::size_t i = n - 1; i-- > 0;)
    rhs[i] = rhs[i] * inv_piv_[i] - upper_[i] * rhs[i + 1];
}

void TridiagFactor::solve(CVec& rhs) const {
  const std::size_t n = inv_piv_.size();
  if (rhs.size() != n) throw std::invalid_argument("TridiagFactor: rhs size");
  for (std::size_t i = 1; i < n; ++i)
    rhs[i] -= lower_[i - 1] * rhs[i - 1] * inv_piv_[i - 1];
  rhs[n - 1] *= inv_piv_[n - 1];
  for (std::size_t i = n - 1; i-- > 0;)
    rhs[i] = rhs[i] * inv_piv_[i] - upper_[i] * rhs[i + 1];
}

int sturm_count_below(const Vec& diag, const Vec& off, double x) {
  const std::size_t n = diag.size();
  constexpr double kPivMin = 1e-300;
  int count = 0;
  double d = diag[0] - x;
  if (std::abs(d) < kPivMin) d = -kPivMin;
  if (d < 0) ++count;
  for (std::size_t i = 1; i < n; ++i) {
    d = (diag[i] - x) - off[i - 1] * off[i - 1] / d;
    if (std::abs(d) < kPivMin) d = -kPivMin;
    if (d < 0) ++count;
  }
  return count;
}

int pencil_count_below(const Vec& diag, const Vec& off, const Vec& mdiag,
                       double x) {
  const std::size_t n = diag.size();
  constexpr double kPivMin = 1e-300;
  int count = 0;
  double d = diag[0] - x * mdiag[0];
  if (std::abs(d) < kPivMin) d = -kPivMin;
  if (d < 0) ++count;
  for (std::size_t i = 1; i < n; ++i) {
    d = (diag[i] - x * mdiag[i]) - off[i - 1] * off[i - 1] / d;
    if (std::abs(d) < kPivMin) d = -kPivMin;
    if (d < 0) ++count;
  }
  return count;
}

namespace {

Vec bisect_lowest(const std::function<int(double)>& count_below, double lo0,
                  double hi0, int n_eig, double rel_tol) {
  Vec out;
  out.reserve(static_cast<std::size_t>(n_eig));
  for (int j = 0; j < n_eig; ++j) {
    double lo = lo0, hi = hi0;
    for (int it = 0; it < 400; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (count_below(mid) >= j + 1)
        hi = mid;
      else
        lo = mid;
      const double scale = std::max(std::abs(lo), std::abs(hi));
      if (hi - lo <= rel_tol * scale || hi - lo < 1e-300) break;
    }
    out.push_back(0.5 * (lo + hi));
  }
  return out;
}

std::pair<double, double> gershgorin_bounds(const Vec& diag, const Vec& off) {
  const std::size_t n = diag.size();
  double lo = diag[0], hi = diag[0];
  for (std::size_t i = 0; i < n; ++i) {
    double rad = 0;
    if (i > 0) rad += std::abs(off[i - 1]);
    if (i + 1 < n) rad += std::abs(off[i]);
    lo = std::min(lo, diag[i] - rad);
    hi = std::max(hi, diag[i] + rad);
  }
  const double pad = 1e-10 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
  return {lo - pad, hi + pad};
}

}  // namespace

Vec tridiag_lowest_eigenvalues(const Vec& diag, const Vec& off, int n_eig,
                               double rel_tol) {
  auto [lo, hi] = gershgorin_bounds(diag, off);
  return bisect_lowest(
      [&](double x) { return sturm_count_below(diag, off, x); }, lo, hi, n_eig,
      rel_tol);
}

Vec pencil_lowest_eigenvalues(const Vec& diag, const Vec& off,
                              const Vec& mdiag, int n_eig, double rel_tol) {
  auto [lo, hi] = gershgorin_bounds(diag, off);
  double mmin = mdiag[0], mmax = mdiag[0];
  for (double m : mdiag) {
    mmin = std::min(mmin, m);
    mmax = std::max(mmax, m);
  }
  if (!(mmin > 0))
    throw std::invalid_argument("pencil_lowest_eigenvalues: mass not positive");
  // mu-range of the pencil from the standard-problem range scaled by mass.
  double plo = std::min(lo / mmin, lo / mmax);
  double phi = std::max(hi / mmin, hi / mmax);
  auto count = [&](double x) { return pencil_count_below(diag, off, mdiag, x); };
  // The mass-scaled range can span hundreds of decades when the mass weight
  // is nearly singular somewhere; shrink it by exponential search so the
  // bisection budget is spent near the actual eigenvalues.
  double hi2 = 1.0;
  while (hi2 < phi && count(hi2) < n_eig) hi2 *= 2;
  hi2 = std::min(hi2, phi);
  double lo2 = -1.0;
  while (lo2 > plo && count(lo2) > 0) lo2 *= 2;
  lo2 = std::max(lo2, plo);
  return bisect_lowest(count, lo2, hi2, n_eig, rel_tol);
}

namespace {

Vec inverse_iteration(const Vec& diag, const Vec& off, const Vec* mdiag,
                      double lambda) {
  const std::size_t n = diag.size();
  double scale = 0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(diag[i]));
  Vec d(n), lo(n > 0 ? n - 1 : 0), up(n > 0 ? n - 1 : 0);
  const double shift_guard = 1e-12 * std::max(scale, std::abs(lambda));
  for (std::size_t i = 0; i < n; ++i)
    d[i] = diag[i] - lambda * (mdiag ? (*mdiag)[i] : 1.0) + shift_guard;
  for (std::size_t i = 0; i + 1 < n; ++i) lo[i] = up[i] = off[i];
  TridiagFactor fac(lo, d, up);
  Vec v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = 1.0 + 1e-3 * std::sin(0.7 * static_cast<double>(i + 1));
  for (int it = 0; it < 4; ++it) {
    fac.solve(v);
    double nrm = 0;
    for (double x : v) nrm += x * x;
    nrm = std::sqrt(nrm);
    if (!(nrm > 0) || !std::isfinite(nrm)) break;
    for (double& x : v) x /= nrm;
  }
  return v;
}

}  // namespace

Vec tridiag_eigenvector(const Vec& diag, const Vec& off, double lambda) {
  return inverse_iteration(diag, off, nullptr, lambda);
}

Vec pencil_eigenvector(const Vec& diag, const Vec& off, const Vec& mdiag,
                       double lambda) {
  return inverse_iteration(diag, off, &mdiag, lambda);
}

// ---------------------------------------------------------------------------
// Product-integration kernel sweeps
// ---------------------------------------------------------------------------

namespace {

// 8-point Gauss-Legendre rule on [0, 1].
constexpr int kGL = 8;
constexpr double kGLx[kGL] = {
    0.019855071751231884, 0.101666761293186630, 0.237233795041835507,
    0.408282678752175098, 0.591717321247824902, 0.762766204958164493,
    0.898333238706813370, 0.980144928248768116};
constexpr double kGLw[kGL] = {
    0.050614268145188130, 0.111190517226687235, 0.156853322938943644,
    0.181341891689180991, 0.181341891689180991, 0.156853322938943644,
    0.111190517226687235, 0.050614268145188130};

// Values of the cubic Lagrange interpolant of f through the four stencil
// nodes x[j0..j0+3], evaluated at the GL points of interval [x[i-1], x[i]].
struct IntervalInterp {
  double s[kGL];   // abscissae
  double fs[kGL];  // interpolated f values
};

IntervalInterp interp_interval(const Vec& x, const Vec& f, std::size_t i) {
  const std::size_t n = x.size();
  std::size_t j0 = (i >= 2) ? i - 2 : 0;
  if (j0 + 3 >= n) j0 = n - 4;
  const double a = x[i - 1], b = x[i];
  IntervalInterp out;
  const double xs[4] = {x[j0], x[j0 + 1], x[j0 + 2], x[j0 + 3]};
  const double fv[4] = {f[j0], f[j0 + 1], f[j0 + 2], f[j0 + 3]};
  double denom[4];
  for (int p = 0; p < 4; ++p) {
    double d = 1;
    for (int q = 0; q < 4; ++q)
      if (q != p) d *= xs[p] - xs[q];
    denom[p] = d;
  }
  for (int g = 0; g < kGL; ++g) {
    const double s = a + (b - a) * kGLx[g];
    out.s[g] = s;
    double acc = 0;
    for (int p = 0; p < 4; ++p) {
      double num = 1;
      for (int q = 0; q < 4; ++q)
        if (q != p) num *= s - xs[q];
      acc += fv[p] * num / denom[p];
    }
    out.fs[g] = acc;
  }
  return out;
}

}  // namespace

Vec bk_sweep(const Vec& r, const Vec& f, int k) {
  if (k < 1) throw std::invalid_argument("bk_sweep: need k >= 1");
  const std::size_t n = r.size();
  if (f.size() != n) throw std::invalid_argument("bk_sweep: size mismatch");
  Vec in(n, 0.0), out(n, 0.0);
  // Inward sweep: in[i] = r_i^{-k} INT_0^{r_i} s^{k+1} f ds, carried scaled.
  double acc = 0.0;
  if (r[0] > 0) {
    // Head closure on [0, r0]: f frozen at f[0].
    acc = f[0] * r[0] * r[0] / static_cast<double>(k + 2);
  }
  in[0] = acc;
  for (std::size_t i = 1; i < n; ++i) {
    const double ratio = std::pow(r[i - 1] / r[i], k);
    acc *= ratio;
    const IntervalInterp ii = interp_interval(r, f, i);
    const double len = r[i] - r[i - 1];
    double piece = 0;
    for (int g = 0; g < kGL; ++g)
      piece += kGLw[g] * std::pow(ii.s[g] / r[i], k) * ii.s[g] * ii.fs[g];
    acc += len * piece;
    in[i] = acc;
  }
  // Outward sweep: out[i] = r_i^{k} INT_{r_i}^{rmax} s^{1-k} f ds, scaled.
  acc = 0.0;
  out[n - 1] = 0.0;
  for (std::size_t i = n - 1; i-- > 0;) {
    const double ratio = std::pow(r[i] / r[i + 1], k);
    acc *= ratio;
    const IntervalInterp ii = interp_interval(r, f, i + 1);
    const double len = r[i + 1] - r[i];
    double piece = 0;
    for (int g = 0; g < kGL; ++g)
      piece += kGLw[g] * std::pow(r[i] / ii.s[g], k) * ii.s[g] * ii.fs[g];
    acc += len * piece;
    out[i] = acc;
  }
  Vec g(n);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = (in[i] + out[i]) / (2.0 * static_cast<double>(k));
  return g;
}

void stream_sweeps(const Vec& r, const Vec& f, Vec& C, Vec& D) {
  const std::size_t n = r.size();
  if (f.size() != n) throw std::invalid_argument("stream_sweeps: size mismatch");
  C.assign(n, 0.0);
  D.assign(n, 0.0);
  double acc = 0.0;
  if (r[0] > 0) acc = f[0] * r[0] * r[0] / 2.0;  // head closure, f frozen
  C[0] = acc;
  for (std::size_t i = 1; i < n; ++i) {
    const IntervalInterp ii = interp_interval(r, f, i);
    const double len = r[i] - r[i - 1];
    double piece = 0;
    for (int g = 0; g < kGL; ++g) piece += kGLw[g] * ii.s[g] * ii.fs[g];
    acc += len * piece;
    C[i] = acc;
  }
  acc = 0.0;
  for (std::size_t i = n - 1; i-- > 0;) {
    const IntervalInterp ii = interp_interval(r, f, i + 1);
    const double len = r[i + 1] - r[i];
    double piece = 0;
    for (int g = 0; g < kGL; ++g)
      piece += kGLw[g] * ii.s[g] * std::log(ii.s[g]) * ii.fs[g];
    acc += len * piece;
    D[i] = acc;
  }
}

Vec stream_function(const Vec& r, const Vec& f) {
  Vec C, D;
  stream_sweeps(r, f, C, D);
  Vec psi(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double lg = (r[i] > 0) ? std::log(r[i]) : 0.0;  // C ~ r^2 kills it
    psi[i] = lg * C[i] + D[i];
  }
  return psi;
}

Vec cumulative_integral(const Vec& r, const Vec& g) {
  const std::size_t n = r.size();
  Vec P(n, 0.0);
  double acc = (r[0] > 0) ? g[0] * r[0] : 0.0;  // head closure, g frozen
  P[0] = acc;
  for (std::size_t i = 1; i < n; ++i) {
    const IntervalInterp ii = interp_interval(r, g, i);
    const double len = r[i] - r[i - 1];
    double piece = 0;
    for (int q = 0; q < kGL; ++q) piece += kGLw[q] * ii.fs[q];
    acc += len * piece;
    P[i] = acc;
  }
  return P;
}

// ---------------------------------------------------------------------------
// Pchip
// ---------------------------------------------------------------------------

Pchip::Pchip(Vec x, Vec y) : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n)
    throw std::invalid_argument("Pchip: need matching sizes >= 2");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1]))
      throw std::invalid_argument("Pchip: abscissae must increase");
  d_.assign(n, 0.0);
  Vec h(n - 1), s(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    s[i] = (y_[i + 1] - y_[i]) / h[i];
  }
  if (n == 2) {
    d_[0] = d_[1] = s[0];
    return;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (s[i - 1] * s[i] <= 0) {
      d_[i] = 0;
    } else {
      const double w1 = 2 * h[i] + h[i - 1];
      const double w2 = h[i] + 2 * h[i - 1];
      d_[i] = (w1 + w2) / (w1 / s[i - 1] + w2 / s[i]);
    }
  }
  auto end_slope = [](double h0, double h1, double s0, double s1) {
    double d = ((2 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
    if (d * s0 <= 0)
      d = 0;
    else if (s0 * s1 <= 0 && std::abs(d) > 3 * std::abs(s0))
      d = 3 * s0;
    return d;
  };
  d_[0] = end_slope(h[0], h[1], s[0], s[1]);
  d_[n - 1] = end_slope(h[n - 2], h[n - 3], s[n - 2], s[n - 3]);
}

std::size_t Pchip::interval(double x) const {
  if (x <= x_.front()) return 0;
  if (x >= x_.back()) return x_.size() - 2;
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  return static_cast<std::size_t>(it - x_.begin()) - 1;
}

double Pchip::eval(double x) const {
  const std::size_t i = interval(x);
  const double h = x_[i + 1] - x_[i];
  const double t = (x - x_[i]) / h;
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
  const double h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t);
  const double h11 = t * t * (t - 1);
  return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
}

double Pchip::deriv(double x) const {
  const std::size_t i = interval(x);
  const double h = x_[i + 1] - x_[i];
  const double t = (x - x_[i]) / h;
  const double g00 = 6 * t * (t - 1) / h;
  const double g10 = (3 * t - 1) * (t - 1);
  const double g01 = -g00;
  const double g11 = t * (3 * t - 2);
  return g00 * y_[i] + g10 * d_[i] + g01 * y_[i + 1] + g11 * d_[i + 1];
}

double Pchip::deriv2(double x) const {
  const std::size_t i = interval(x);
  const double h = x_[i + 1] - x_[i];
  const double t = (x - x_[i]) / h;
  const double g00 = (12 * t - 6) / (h * h);
  const double g10 = (6 * t - 4) / h;
  const double g01 = -g00;
  const double g11 = (6 * t - 2) / h;
  return g00 * y_[i] + g10 * d_[i] + g01 * y_[i + 1] + g11 * d_[i + 1];
}

double lin_interp(const Vec& x, const Vec& y, double xq) {
  if (xq <= x.front()) return y.front();
  if (xq >= x.back()) return y.back();
  const auto it = std::upper_bound(x.begin(), x.end(), xq);
  const std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
  const double t = (xq - x[i]) / (x[i + 1] - x[i]);
  return y[i] + t * (y[i + 1] - y[i]);
}

// ---------------------------------------------------------------------------
// FFT
// ---------------------------------------------------------------------------

void fft_pow2(CVec& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw std::invalid_argument("fft_pow2: length must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2 * kPi / static_cast<double>(len) * (inverse ? 1 : -1);
    const Cplx wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      Cplx w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        const Cplx u = a[i + j];
        const Cplx v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse)
    for (Cplx& z : a) z /= static_cast<double>(n);
}

Vec angular_synthesis(const CVec& modes, std::size_t m) {
  if (2 * modes.size() > m + 1)
    throw std::invalid_argument("angular_synthesis: too many modes for m");
  CVec spec(m, Cplx(0.0, 0.0));
  if (!modes.empty()) spec[0] = modes[0];
  for (std::size_t k = 1; k < modes.size(); ++k) {
    spec[k] = modes[k];
    spec[m - k] = std::conj(modes[k]);
  }
  fft_pow2(spec, true);
  Vec out(m);
  for (std::size_t j = 0; j < m; ++j)
    out[j] = spec[j].real() * static_cast<double>(m);
  return out;
}

CVec angular_analysis(const Vec& values, int k_max) {
  const std::size_t m = values.size();
  if (k_max < 0 || 2 * static_cast<std::size_t>(k_max) >= m)
    throw std::invalid_argument("angular_analysis: k_max too large for m");
  CVec a(m);
  for (std::size_t j = 0; j < m; ++j) a[j] = values[j];
  fft_pow2(a, false);
  CVec out(static_cast<std::size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k)
    out[static_cast<std::size_t>(k)] =
        a[static_cast<std::size_t>(k)] / static_cast<double>(m);
  return out;
}

std::size_t collocation_count(int k) {
  std::size_t m = 16;
  const std::size_t need = 4 * static_cast<std::size_t>(std::max(k, 1));
  while (m < need) m *= 2;
  return m;
}

// ---------------------------------------------------------------------------
// Threading
// ---------------------------------------------------------------------------

int num_threads() {
  static const int cached = [] {
    const char* env = std::getenv("ARNOLD_LAB_THREADS");
    if (!env) return 1;
    const int v = std::atoi(env);
    return v >= 1 ? v : 1;
  }();
  return cached;
}

void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body) {
  const int nt = num_threads();
  if (nt <= 1 || n < 2) {
    body(0, n);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(nt), n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t t = 0; t < workers; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace arnold
