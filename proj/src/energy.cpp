#include "arnold/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "arnold/special.hpp"

namespace arnold {

std::string to_string(HypVerdict v) {
  switch (v) {
    case HypVerdict::admissible:
      return "admissible";
    case HypVerdict::borderline:
      return "borderline";
    case HypVerdict::violated:
      return "violated";
  }
  return "unknown";
}

namespace {

constexpr double kTiny = 1e-300;
const double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Gaussian entropy pair: phi(w) = 2 log 2 - gamma + E_in(log(1/w)) with
// Phi' = phi and Phi(0) = 0.
// ---------------------------------------------------------------------------

double gauss_phi(double w) {
  w = std::max(w, kTiny);
  return 2 * std::log(2.0) - kEulerGamma + e_in(-std::log(w));
}

/// E1(z) - E1(2z) for z > 0 without the small-z cancellation.
double e1_diff(double z) {
  if (z < 1e-3)
    return std::log(2.0) +
           z * (-1 + z * (0.75 + z * (-7.0 / 18 + z * (5.0 / 32))));
  if (z > 690) return 0.0;
  return expint_e1(z) - expint_e1(2 * z);
}

double gauss_Phi(double u) {
  if (u <= 0) return 0.0;
  const double c0 = 2 * std::log(2.0) - kEulerGamma;
  if (u <= 1) {
    if (u == 1) return std::log(2.0) + c0;
    const double z = -std::log(u);
    return u * (c0 + e_in(z)) + e1_diff(z);
  }
  const double L = std::log(u);
  // Continuation across u = 1 in closed form; the first-order expansion
  // bridges the log L singularity of the individual terms.
  if (L < 1e-12) return std::log(2.0) + c0 + (u - 1) * c0;
  if (u > 1e150) return -0.5 * u * u / L;  // leading behaviour, off-range
  return 2 * u * std::log(2.0) + u * std::log(L) - (1 + u) * expint_ei(L) +
         expint_ei(2 * L);
}

double gauss_phi_inverse(double y) {
  return std::exp(-e_in_inverse(y - 2 * std::log(2.0) + kEulerGamma));
}

// ---------------------------------------------------------------------------
// Algebraic entropy pair for omega(r) = (1 + r^2)^{-kappa}, kappa > 1.
// With nu = kappa - 1 and y = w^{-1/kappa},
//   phi(w)  = psi0 + I(y) / (4 nu),
//   I(y)    = log y - (1 - y^{-nu}) / nu + T(1/y),
//   T(b)    = INT_b^1 (1 - x^nu) / (1 - x) dx,
//   Phi(u)  = psi0 u + (I(Y) u + J2(1/Y)) / (4 nu),  Y = u^{-1/kappa},
//   J2(b)   = INT_0^b (1 - x^nu) x^{kappa-1} / (1 - x) dx,
// where psi0 = -(gamma + digamma(nu)) / (4 nu) is the central stream value
// of the unit-amplitude profile and J2(1) = digamma(kappa + nu) -
// digamma(kappa). All integrals reduce to fast series away from x = 1 plus
// short Gauss-Legendre panels near it.
// ---------------------------------------------------------------------------

constexpr double kGl20X[10] = {
    0.0765265211334973, 0.2277858511416451, 0.3737060887154195,
    0.5108670019508271, 0.6360536807265150, 0.7463319064601508,
    0.8391169718222188, 0.9122344282513259, 0.9639719272779138,
    0.9931285991850949};
constexpr double kGl20W[10] = {
    0.1527533871307258, 0.1491729864726037, 0.1420961093183820,
    0.1316886384491766, 0.1181945319615184, 0.1019301198172404,
    0.0832767415767048, 0.0626720483341091, 0.0406014298003869,
    0.0176140071391521};

template <class F>
double gl20(const F& f, double a, double b) {
  const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
  double s = 0;
  for (int i = 0; i < 10; ++i)
    s += kGl20W[i] * (f(c + hw * kGl20X[i]) + f(c - hw * kGl20X[i]));
  return s * hw;
}

/// (1 - x^nu) / (1 - x), with the removable singularity at x = 1 expanded.
double frac_integrand(double x, double nu) {
  const double t = 1 - x;
  if (std::abs(t) < 1e-6) return nu * (1 + (1 - nu) * t / 2);
  return -std::expm1(nu * std::log(x)) / t;
}

/// INT_1^b (1 - x^nu)/(1 - x) x^{ex} dx for b >= 1, by unit log-space panels.
double seg_above_one(double b, double nu, double ex) {
  const double lb = std::log(b);
  if (!(lb > 0)) return 0.0;
  const int np = std::max(1, static_cast<int>(std::ceil(2 * lb)));
  double s = 0;
  for (int p = 0; p < np; ++p)
    s += gl20(
        [&](double sig) {
          const double x = std::exp(sig);
          return frac_integrand(x, nu) * std::pow(x, ex + 1);
        },
        lb * p / np, lb * (p + 1) / np);
  return s;
}

struct AlgParts {
  double kappa = 0, nu = 0;
  double psi0 = 0;  ///< central stream value of the unit profile
  double Hnu = 0;   ///< INT_0^1 (1 - x^nu)/(1 - x) dx = digamma(nu+1) + gamma
  double J2_1 = 0;  ///< J2(1) = digamma(kappa + nu) - digamma(kappa)
};

AlgParts alg_parts(double kappa) {
  AlgParts ap;
  ap.kappa = kappa;
  ap.nu = kappa - 1;
  ap.psi0 = -(kEulerGamma + digamma(ap.nu)) / (4 * ap.nu);
  ap.Hnu = digamma(ap.nu + 1) + kEulerGamma;
  ap.J2_1 = digamma(kappa + ap.nu) - digamma(kappa);
  return ap;
}

double tail_T(const AlgParts& ap, double b) {
  if (b == 1) return 0.0;
  if (b > 1) return -seg_above_one(b, ap.nu, 0.0);
  if (b > 0.5)
    return gl20([&](double x) { return frac_integrand(x, ap.nu); }, b, 1.0);
  // T(b) = Hnu - INT_0^b, the lower piece by its power series.
  double R = 0, p = b, pn = std::pow(b, ap.nu + 1);
  for (int m = 0; m < 200; ++m) {
    const double add = p / (m + 1) - pn / (m + ap.nu + 1);
    R += add;
    p *= b;
    pn *= b;
    if (m > 8 && std::abs(add) < 1e-17 * (1 + std::abs(R))) break;
  }
  return ap.Hnu - R;
}

/// I(y) = INT_1^y (1 - t^{-nu})/(t - 1) dt. The y > 1 branch folds into
/// T(1/y) on (0, 1); the y < 1 branch is evaluated directly as
/// -INT_y^1 t^{-nu} q(t) dt (series below 1/2 plus one panel), which keeps
/// every term the same sign -- the folded form cancels catastrophically
/// when y^{-nu} is large.
double alg_I(const AlgParts& ap, double y) {
  if (y >= 1)
    return std::log(y) - (1 - std::pow(y, -ap.nu)) / ap.nu + tail_T(ap, 1 / y);
  const double nu = ap.nu;
  auto tq = [nu](double t) {
    return std::pow(t, -nu) * frac_integrand(t, nu);
  };
  if (y >= 0.5) return -gl20(tq, y, 1.0);
  // series of INT_y^{1/2} t^{-nu} q(t) dt = sum_m INT (t^{m-nu} - t^m) dt
  double s = 0;
  double ph = std::pow(0.5, 1 - nu), py = std::pow(y, 1 - nu);
  double qh = 0.5, qy = y;
  for (int m = 0; m < 400; ++m) {
    const double e1 = m - nu + 1;
    const double t1 =
        std::abs(e1) < 1e-9 ? std::log(0.5 / y) : (ph - py) / e1;
    const double add = t1 - (qh - qy) / (m + 1);
    s += add;
    ph *= 0.5;
    py *= y;
    qh *= 0.5;
    qy *= y;
    if (m > 8 && std::abs(add) < 1e-17 * (1 + std::abs(s))) break;
  }
  return -(s + gl20(tq, 0.5, 1.0));
}

double alg_phi(const AlgParts& ap, double w) {
  w = std::max(w, kTiny);
  const double y = std::pow(w, -1.0 / ap.kappa);
  return ap.psi0 + alg_I(ap, y) / (4 * ap.nu);
}

double alg_J2(const AlgParts& ap, double b) {
  if (b > 1) return ap.J2_1 + seg_above_one(b, ap.nu, ap.kappa - 1);
  if (b > 0.9)
    return ap.J2_1 -
           gl20(
               [&](double x) {
                 return frac_integrand(x, ap.nu) * std::pow(x, ap.kappa - 1);
               },
               b, 1.0);
  double s = 0, p = std::pow(b, ap.kappa), pn = std::pow(b, ap.kappa + ap.nu);
  for (int m = 0; m < 2000; ++m) {
    const double add = p / (m + ap.kappa) - pn / (m + ap.kappa + ap.nu);
    s += add;
    p *= b;
    pn *= b;
    if (m > 8 && std::abs(add) < 1e-17 * (1 + std::abs(s))) break;
  }
  return s;
}

double alg_Phi(const AlgParts& ap, double u) {
  if (u <= 0) return 0.0;
  const double Y = std::pow(u, -1.0 / ap.kappa);
  return ap.psi0 * u + (alg_I(ap, Y) * u + alg_J2(ap, 1 / Y)) / (4 * ap.nu);
}

/// Log-bisection inverse of a strictly decreasing phi on [1e-300, 1e300].
double decreasing_inverse(const std::function<double(double)>& phi, double y,
                          int iters) {
  double lo = std::log(kTiny), hi = std::log(1e300);
  if (phi(std::exp(lo)) <= y) return std::exp(lo);
  if (phi(std::exp(hi)) >= y) return std::exp(hi);
  for (int it = 0; it < iters; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (phi(std::exp(mid)) > y)
      lo = mid;
    else
      hi = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

HypVerdict verdict_of(double C2, double C3, double m8) {
  const double tol = 1e-12 * std::max({1.0, m8, C2});
  const bool lo_ok = C2 < m8 - tol;
  const bool lo_eq = std::abs(C2 - m8) <= tol;
  const bool hi_ok = C3 > m8 + tol;
  const bool hi_eq = std::isfinite(C3) && std::abs(C3 - m8) <= tol;
  if (lo_ok && hi_ok) return HypVerdict::admissible;
  if ((lo_ok || lo_eq) && (hi_ok || hi_eq)) return HypVerdict::borderline;
  return HypVerdict::violated;
}

/// Companion constant: sup over w in (1e-12 M, M] of
/// Phi(w)/w - c2eff log(M/w), with c2eff slightly above C2 so the small-w
/// supremum stays finite even when Phi grows like w log log(1/w).
double c1_sup(const std::function<double(double)>& Phi, double M,
              double c2eff) {
  double best = -kInf;
  const int n = 241;
  for (int i = 0; i < n; ++i) {
    const double w = M * std::pow(1e-12, 1.0 - double(i) / (n - 1));
    best = std::max(best, Phi(w) / w - c2eff * std::log(M / w));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Angular collocation cells shared by the rearrangement and the entropy
// quadratures: row i carries the samples at radius r_i, each owning the
// area 2 pi w_i / m.
// ---------------------------------------------------------------------------

std::vector<Vec> sample_rows(const PolarField& field, std::size_t& m_out) {
  const RadialGrid& g = field.grid;
  const std::size_t n = g.size();
  const int K = field.max_mode();
  std::vector<Vec> rows(n);
  if (K == 0) {
    m_out = 1;
    const CVec w0 = field.mode(0);
    for (std::size_t i = 0; i < n; ++i) rows[i] = {w0[i].real()};
    return rows;
  }
  m_out = collocation_count(K);
  std::vector<CVec> tables(static_cast<std::size_t>(K) + 1);
  for (int k = 0; k <= K; ++k) tables[static_cast<std::size_t>(k)] = field.mode(k);
  CVec local(static_cast<std::size_t>(K) + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k <= K; ++k)
      local[static_cast<std::size_t>(k)] = tables[static_cast<std::size_t>(k)][i];
    rows[i] = angular_synthesis(local, m_out);
  }
  return rows;
}

}  // namespace

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

EntropyFunction entropy_catalog(EntropyKind kind, double kappa) {
  EntropyFunction ef;
  ef.kind = kind;
  if (kind == EntropyKind::custom)
    throw std::invalid_argument(
        "entropy_catalog: custom entropies are user-supplied, not cataloged");
  if (kind == EntropyKind::gaussian) {
    ef.kappa = 0;
    ef.Phi = [](double u) { return gauss_Phi(u); };
    ef.phi = [](double w) { return gauss_phi(w); };
    ef.phi_inverse = [](double y) { return gauss_phi_inverse(y); };
    ef.hyp_constants = [Phi = ef.Phi](double M) {
      EntropyFunction::HypConstants hc;
      hc.C2 = 0;
      hc.C3 = kInf;
      const double m8 = M / (8 * kPi);
      hc.C1 = c1_sup(Phi, M, 0.5 * m8);
      hc.verdict = M > 0 ? HypVerdict::admissible : HypVerdict::violated;
      return hc;
    };
    return ef;
  }
  if (!(kappa > 1))
    throw std::invalid_argument(
        "entropy_catalog: algebraic entropy requires kappa > 1");
  ef.kappa = kappa;
  const double nu = kappa - 1;

  if (std::abs(kappa - 2) <= 1e-12) {
    ef.phi = [](double w) { return -std::log(std::max(w, kTiny)) / 8; };
    ef.Phi = [](double u) {
      return u <= 0 ? 0.0 : u * (1 - std::log(u)) / 8;
    };
    ef.phi_inverse = [](double y) { return std::exp(-8 * y); };
  } else if (std::abs(kappa - 3) <= 1e-12) {
    ef.phi = [](double w) {
      w = std::max(w, kTiny);
      return -std::log(w) / 24 - std::cbrt(w) / 8;
    };
    ef.Phi = [](double u) {
      if (u <= 0) return 0.0;
      return u * (1 - std::log(u)) / 24 -
             0.09375 * u * std::cbrt(u);  // 3/32 u^{4/3}
    };
    ef.phi_inverse = [phi = ef.phi](double y) {
      return decreasing_inverse(phi, y, 120);
    };
  } else if (std::abs(kappa - 1.5) <= 1e-12) {
    ef.phi = [](double w) {
      w = std::max(w, kTiny);
      return std::log1p(std::pow(w, -1.0 / 3.0));
    };
    ef.Phi = [](double u) {
      if (u <= 0) return 0.0;
      const double c = std::cbrt(u);
      return u * std::log1p(1 / c) + c * c / 2 - c + std::log1p(c);
    };
    ef.phi_inverse = [](double y) {
      if (!(y > 0)) return 1e300;
      const double e = std::expm1(y);
      return 1 / (e * e * e);
    };
  } else {
    const AlgParts ap = alg_parts(kappa);
    ef.phi = [ap](double w) { return alg_phi(ap, w); };
    ef.Phi = [ap](double u) { return alg_Phi(ap, u); };
    ef.phi_inverse = [ap](double y) {
      return decreasing_inverse([ap](double w) { return alg_phi(ap, w); }, y,
                                90);
    };
  }

  const double C2 = 1 / (4 * kappa * nu);
  double C3;
  if (kappa > 2 + 1e-12)
    C3 = kInf;
  else if (std::abs(kappa - 2) <= 1e-12)
    C3 = 0.125;
  else
    C3 = 0.0;
  ef.hyp_constants = [Phi = ef.Phi, C2, C3](double M) {
    EntropyFunction::HypConstants hc;
    hc.C2 = C2;
    hc.C3 = C3;
    const double m8 = M / (8 * kPi);
    hc.C1 = c1_sup(Phi, M, C2 < m8 ? 0.5 * (C2 + m8) : C2);
    hc.verdict = verdict_of(C2, C3, m8);
    return hc;
  };
  return ef;
}

// ---------------------------------------------------------------------------
// Interaction energy
// ---------------------------------------------------------------------------

double energy_radial(const Vec& field, const RadialGrid& grid) {
  if (field.size() != grid.size())
    throw std::invalid_argument("energy_radial: field/grid size mismatch");
  // -pi sum_{i,j} a_i a_j log(max(r_i, r_j)) with a_i = omega_i w_i,
  // folded into one pass over the running mass; a_i = 0 nodes carry no
  // weight and are skipped. An origin node with weight only loses its
  // self-interaction row (log max(0, r_j) = log r_j for every cross term,
  // and the r = 0 self term vanishes in the continuum).
  double e = 0, cum = 0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double a = field[i] * grid.w[i];
    cum += a;
    if (a == 0 || grid.r[i] == 0) continue;
    e -= kPi * a * std::log(grid.r[i]) * (2 * cum - a);
  }
  return e;
}

double energy_modes(const PolarField& field) {
  const RadialGrid& g = field.grid;
  const std::size_t n = g.size();
  const CVec w0 = field.mode(0);
  Vec re0(n);
  for (std::size_t i = 0; i < n; ++i) re0[i] = w0[i].real();
  double e = energy_radial(re0, g);
  for (const auto& [k, vals] : field.modes) {
    if (k == 0) continue;
    Vec re(n), im(n);
    for (std::size_t i = 0; i < n; ++i) {
      re[i] = vals[i].real();
      im[i] = vals[i].imag();
    }
    const Vec bre = bk_sweep(g.r, re, std::abs(k));
    const Vec bim = bk_sweep(g.r, im, std::abs(k));
    double s = 0;
    for (std::size_t i = 0; i < n; ++i)
      s += (bre[i] * re[i] + bim[i] * im[i]) * g.w[i];
    e += kPi * s;
  }
  return e;
}

// ---------------------------------------------------------------------------
// Rearrangement
// ---------------------------------------------------------------------------

Vec rearrange(const PolarField& field) {
  const RadialGrid& g = field.grid;
  const std::size_t n = g.size();
  std::size_t m = 1;
  const std::vector<Vec> rows = sample_rows(field, m);

  std::vector<std::pair<double, double>> cells;  // (value, area)
  cells.reserve(n * m);
  double mass_in = 0, vmax = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double area = 2 * kPi * g.w[i] / static_cast<double>(m);
    for (double v : rows[i]) {
      if (v < -1e-10)
        throw std::invalid_argument("rearrange: field is not nonnegative");
      v = std::max(v, 0.0);
      if (area > 0) cells.emplace_back(v, area);
      mass_in += v * area;
      vmax = std::max(vmax, v);
    }
  }
  if (!(vmax > 0)) return Vec(n, 0.0);

  std::sort(cells.begin(), cells.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  Vec cumarea(cells.size());
  double acc = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    acc += cells[i].second;
    cumarea[i] = acc;
  }

  // Geometric ladder of level sets: A_l = area{ value > t_l } with
  // t_l = vmax * (1e-12)^{l/(L-1)}.
  const int L = 512;
  Vec levels(L), areas(L);
  const double ratio = std::pow(1e-12, 1.0 / (L - 1));
  double t = vmax;
  for (int l = 0; l < L; ++l) {
    levels[l] = t;
    // first cell with value <= t_l, via the descending sort
    std::size_t lo = 0, hi = cells.size();
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (cells[mid].first > t)
        lo = mid + 1;
      else
        hi = mid;
    }
    areas[l] = lo == 0 ? 0.0 : cumarea[lo - 1];
    t *= ratio;
  }

  // Node values: invert area{ > t } at the disc areas pi r_i^2, linear in
  // area between ladder rungs and exponential in the level.
  Vec out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double target = kPi * g.r[i] * g.r[i];
    if (target >= areas[L - 1]) {
      out[i] = 0.0;
      continue;
    }
    int lo = 0, hi = L - 1;
    while (lo < hi) {  // first rung with area >= target
      const int mid = (lo + hi) / 2;
      if (areas[mid] < target)
        lo = mid + 1;
      else
        hi = mid;
    }
    if (lo == 0) {
      out[i] = levels[0];
      continue;
    }
    const double a0 = areas[lo - 1], a1 = areas[lo];
    const double f = a1 > a0 ? (target - a0) / (a1 - a0) : 1.0;
    out[i] = std::exp((1 - f) * std::log(levels[lo - 1]) +
                      f * std::log(levels[lo]));
  }

  double mass_out = 0;
  for (std::size_t i = 0; i < n; ++i) mass_out += out[i] * g.w[i];
  mass_out *= 2 * kPi;
  if (mass_out > 0 && mass_in > 0) {
    const double scale = mass_in / mass_out;
    for (double& v : out) v *= scale;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Distribution-function energy
// ---------------------------------------------------------------------------

ConstraintProfile constraint_profile(const Profile& profile, double r_hint) {
  ConstraintProfile cp;
  const double m = profile.omega(0.0);
  if (!(m > 0))
    throw std::invalid_argument("constraint_profile: profile peak must be positive");
  cp.m = m;
  const double hint = r_hint > 0 ? r_hint : 1.0;
  cp.hbar = [profile, m, hint](double a) {
    if (!(a > 0))
      throw std::invalid_argument("hbar: level must be positive");
    if (a >= m) return 0.0;
    double hi = hint;
    for (int it = 0; it < 4000 && profile.omega(hi) > a; ++it) hi *= 2;
    double lo = 0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (profile.omega(mid) > a)
        lo = mid;
      else
        hi = mid;
    }
    const double r = 0.5 * (lo + hi);
    return r * r;
  };
  // Mass pi INT_0^m hbar(a) da on the log-level coordinate a = m e^{-u},
  // with u = v^2 clustering nodes at the peak level where hbar kinks.
  const std::size_t n = 8193;
  const double vmax = std::sqrt(120.0);
  const Vec wv = simpson_weights(n, vmax / double(n - 1));
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = vmax * double(i) / double(n - 1);
    const double a = m * std::exp(-v * v);
    s += wv[i] * 2 * v * cp.hbar(a) * a;
  }
  cp.M0 = kPi * s;
  return cp;
}

double energy_via_h(const ConstraintProfile& cp) {
  if (!cp.hbar || !(cp.m > 0))
    throw std::invalid_argument("energy_via_h: empty constraint profile");
  // Level coordinate a = m e^{-u} with u = v^2: the substitution clusters
  // nodes at the peak level, where h log(h) has a u log(u) corner that
  // would otherwise cap the quadrature order.
  const std::size_t n = 8193;
  const double vmax = std::sqrt(120.0);
  Vec u(n), a(n), h(n), jac(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = vmax * double(i) / double(n - 1);
    u[i] = v * v;
    jac[i] = 2 * v;
    a[i] = cp.m * std::exp(-u[i]);
    h[i] = cp.hbar(a[i]);
    if (!(h[i] >= 0) || !std::isfinite(h[i]))
      throw std::invalid_argument("energy_via_h: hbar must be finite and >= 0");
    if (i > 0 && h[i] < h[i - 1] - 1e-9 * (1 + h[i - 1]))
      throw std::invalid_argument(
          "energy_via_h: hbar must be nonincreasing in the level");
  }
  const Vec wv = simpson_weights(n, vmax / double(n - 1));
  double m0 = 0;
  for (std::size_t i = 0; i < n; ++i) m0 += wv[i] * jac[i] * h[i] * a[i];
  m0 *= kPi;
  // L(R, S) = -R S log max(R, S) - min(R, S)^2 / 2 split along the level
  // order: with h nondecreasing in u, max(h_i, h_j) = h_{min(i,j)} never
  // produces kinks in the inner integral.
  Vec f(n);
  for (std::size_t i = 0; i < n; ++i)
    f[i] = h[i] > 0 ? h[i] * std::log(h[i]) * a[i] : 0.0;
  const Vec P = cumulative_integral(u, f);
  const double pend = P[n - 1];
  double term1 = 0, term2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    term1 += wv[i] * jac[i] * h[i] * (pend - P[i]) * a[i];
    term2 += wv[i] * jac[i] * a[i] * a[i] * h[i] * h[i];
  }
  return kPi / 8 * (-2 * term1 - term2) + m0 * m0 / (8 * kPi);
}

// ---------------------------------------------------------------------------
// Free energy and the log-HLS defect
// ---------------------------------------------------------------------------

FreeEnergyValue free_energy(const PolarField& field,
                            const EntropyFunction& entropy) {
  if (!entropy.Phi)
    throw std::invalid_argument("free_energy: entropy lacks Phi");
  FreeEnergyValue out;
  out.E = energy_modes(field);
  const RadialGrid& g = field.grid;
  std::size_t m = 1;
  const std::vector<Vec> rows = sample_rows(field, m);
  double spos = 0, sneg = 0, vedge = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double area = 2 * kPi * g.w[i] / static_cast<double>(m);
    for (double v : rows[i]) {
      const double p = entropy.Phi(std::max(v, 0.0));
      if (p >= 0)
        spos += p * area;
      else
        sneg -= p * area;
    }
  }
  for (double v : rows.back()) vedge = std::max(vedge, std::abs(v));
  out.s_diverged = sneg > 1e6 * std::max(1.0, spos);
  out.S = out.s_diverged ? -kInf : spos - sneg;
  out.F = out.E + out.S;
  if (vedge > 0 && entropy.phi)
    out.tail_bound =
        4 * kPi * vedge * (1 + std::abs(entropy.phi(std::max(vedge, kTiny))));
  else if (vedge > 0)
    out.tail_bound = 4 * kPi * vedge;
  return out;
}

double log_hls_gap(const PolarField& field) {
  const double M = moments(field).M0;
  if (!(M > 0))
    throw std::invalid_argument("log_hls_gap: field must carry positive mass");
  const double E = energy_modes(field);
  const RadialGrid& g = field.grid;
  std::size_t m = 1;
  const std::vector<Vec> rows = sample_rows(field, m);
  const double logm = std::log(M);
  double ent = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double area = 2 * kPi * g.w[i] / static_cast<double>(m);
    for (double v : rows[i])
      if (v > 0) ent += v * (logm - std::log(v)) * area;
  }
  return M * M * (1 + std::log(kPi)) / (8 * kPi) - E - M / (8 * kPi) * ent;
}

}  // namespace arnold
