#include "arnold/forms.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "arnold/energy.hpp"
#include "arnold/spectral.hpp"

namespace arnold {

double j_form(const PolarField& field, const Profile& profile) {
  const double xn = field.x_norm_sq(profile);
  if (!std::isfinite(xn))
    throw std::invalid_argument("j_form: weighted norm diverges on this field");
  return 0.5 * xn - energy_modes(field);
}

double q_form(const PolarField& field, const Profile& profile) {
  // In the transformed variable v_k = e^chi omega_k the form reads
  //   sum_k 2 pi [ INT |v_k'|^2 r dr + INT (W + k^2/r^2) |v_k|^2 r dr ],
  // and the gradient piece is discretized with interval-midpoint fluxes so
  // that on a cell-centred grid the sum is exactly the quadratic form of
  // the assembled L_k matrices.
  const RadialGrid& g = field.grid;
  const std::size_t n = g.size();
  if (n < 2) throw std::invalid_argument("q_form: grid too small");
  Vec echi(n), W(n);
  for (std::size_t i = 0; i < n; ++i) {
    echi[i] = std::exp(profile.chi(g.r[i]));
    W[i] = profile.weight_W(g.r[i]);
  }
  double total = 0;
  CVec v(n);
  for (const auto& [k, vals] : field.modes) {
    for (std::size_t i = 0; i < n; ++i) v[i] = echi[i] * vals[i];
    double s = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double rmid = 0.5 * (g.r[i] + g.r[i + 1]);
      s += rmid * std::norm(v[i + 1] - v[i]) / (g.r[i + 1] - g.r[i]);
    }
    const double k2 = double(k) * double(k);
    for (std::size_t i = 0; i < n; ++i) {
      if (g.w[i] == 0) continue;
      double pot = W[i];
      if (k != 0) {
        if (g.r[i] == 0) continue;  // singular centrifugal node, zero cell
        pot += k2 / (g.r[i] * g.r[i]);
      }
      s += pot * std::norm(v[i]) * g.w[i];
    }
    total += 2 * kPi * s;
  }
  return total;
}

double n_form(const PolarField& field, const Profile& profile) {
  const RadialGrid& g = field.grid;
  const int K = field.max_mode();
  if (K == 0) return 0.0;  // d/dtheta annihilates radial fields
  const std::size_t n = g.size();
  const std::size_t m = collocation_count(K);  // alias-free cubic products
  std::vector<CVec> wk(static_cast<std::size_t>(K) + 1);
  std::vector<CVec> pk(static_cast<std::size_t>(K) + 1);
  wk[0] = field.mode(0);
  pk[0].assign(n, Cplx(0.0, 0.0));
  for (int k = 1; k <= K; ++k) {
    wk[static_cast<std::size_t>(k)] = field.mode(k);
    const CVec b = bk_apply(k, wk[static_cast<std::size_t>(k)], g);
    CVec& p = pk[static_cast<std::size_t>(k)];
    p.resize(n);
    const Cplx ik(0.0, double(k));
    for (std::size_t i = 0; i < n; ++i) p[i] = ik * (-b[i]);  // dtheta psi_k
  }
  double total = 0;
  CVec roww(static_cast<std::size_t>(K) + 1), rowp(static_cast<std::size_t>(K) + 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (g.w[i] == 0) continue;
    const double r = g.r[i];
    const double aor = r > 1e-8 ? profile.weight_A_prime(r) / r
                                : profile.weight_A_prime(1e-8) / 1e-8;
    for (int k = 0; k <= K; ++k) {
      roww[static_cast<std::size_t>(k)] = wk[static_cast<std::size_t>(k)][i];
      rowp[static_cast<std::size_t>(k)] = pk[static_cast<std::size_t>(k)][i];
    }
    const Vec vw = angular_synthesis(roww, m);
    const Vec vp = angular_synthesis(rowp, m);
    double s = 0;
    for (std::size_t j = 0; j < m; ++j) s += vp[j] * vw[j] * vw[j];
    total += g.w[i] * aor * s;
  }
  return total * kPi / double(m);  // (1/2) * (2 pi / m)
}

GammaEstimate gamma_estimate(const Profile& profile, const RadialGrid& grid) {
  GammaEstimate ge;
  const SpectralReport bt = btilde1_spectrum(profile, grid);
  const SpectralReport hd = hardy_constant(profile, grid);
  ge.c1_prime = bt.derived.at("C1prime");
  ge.hardy = hd.derived.at("C_H");
  ge.radial_sector_coercive = ge.hardy < 1.0;
  ge.gamma = std::min(0.5, 1.0 - ge.c1_prime);
  if (ge.radial_sector_coercive) ge.gamma = std::min(ge.gamma, 1.0 - ge.hardy);
  return ge;
}

DeltaEstimate delta_estimate(const RadialGrid& grid) {
  DeltaEstimate de;
  const Profile prof = gaussian_profile();
  const SpectralReport r0 = lk_spectrum(0, grid);
  const SpectralReport r1 = lk_spectrum(1, grid);
  const SpectralReport r2 = lk_spectrum(2, grid);
  auto overlap = [](const Vec& r, const Vec& f, const Vec& h) {
    double fh = 0, ff = 0, hh = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      fh += f[i] * h[i] * r[i];
      ff += f[i] * f[i] * r[i];
      hh += h[i] * h[i] * r[i];
    }
    return std::abs(fh) / std::sqrt(ff * hh);
  };
  Vec h0(r0.abscissae.size()), h1(r1.abscissae.size());
  for (std::size_t i = 0; i < h0.size(); ++i)
    h0[i] = std::exp(-prof.chi(r0.abscissae[i]));
  for (std::size_t i = 0; i < h1.size(); ++i)
    h1[i] = r1.abscissae[i] * std::exp(-prof.chi(r1.abscissae[i]));
  de.overlap0 = overlap(r0.abscissae, r0.eigenfunctions.at(0), h0);
  de.overlap1 = overlap(r1.abscissae, r1.eigenfunctions.at(0), h1);
  de.delta0 =
      coercivity_bound(-r0.eigenvalues.at(0), r0.eigenvalues.at(1), de.overlap0);
  de.delta1 =
      coercivity_bound(-r1.eigenvalues.at(0), r1.eigenvalues.at(1), de.overlap1);
  de.delta2 = r2.eigenvalues.at(0);
  de.delta_high = 0.5;
  de.delta = std::min({de.delta0, de.delta1, de.delta2, de.delta_high});
  return de;
}

FormValues form_values(const PolarField& field, const Profile& profile,
                       double gamma, double delta) {
  FormValues fv;
  fv.J = j_form(field, profile);
  fv.Q = q_form(field, profile);
  fv.N = n_form(field, profile);
  fv.gamma = gamma;
  fv.delta = delta;
  fv.x_norm_sq = field.x_norm_sq(profile);
  fv.grad_norm_sq = field.grad_norm_sq(profile);
  return fv;
}

std::string FormValues::to_json() const {
  std::ostringstream os;
  os.precision(12);
  os << "{\"J\": " << J << ", \"Q\": " << Q << ", \"N\": " << N
     << ", \"gamma\": " << gamma << ", \"delta\": " << delta
     << ", \"x_norm_sq\": " << x_norm_sq
     << ", \"grad_norm_sq\": " << grad_norm_sq << "}";
  return os.str();
}

PolarField random_field(const RadialGrid& grid, std::uint64_t seed, int k_band,
                        int radial_waves) {
  if (k_band < 0 || radial_waves < 1)
    throw std::invalid_argument("random_field: bad band parameters");
  PolarField f(grid);
  std::mt19937_64 gen(seed ? seed : 0x9e3779b97f4a7c15ull);
  std::normal_distribution<double> nd(0.0, 1.0);
  const std::size_t n = grid.size();
  const double rref = std::min(grid.r_max, 12.0);
  for (int k = 0; k <= k_band; ++k) {
    std::vector<Cplx> coef(static_cast<std::size_t>(radial_waves) + 1);
    for (int j = 1; j <= radial_waves; ++j) {
      const double re = nd(gen);
      const double im = k == 0 ? 0.0 : nd(gen);
      coef[static_cast<std::size_t>(j)] = Cplx(re, im) / double(j);
    }
    CVec mode(n);
    for (std::size_t i = 0; i < n; ++i) {
      // gaussian envelope keeps the A-weighted norms finite on any domain
      const double u = std::min(grid.r[i] / rref, 1.0);
      Cplx s(0.0, 0.0);
      for (int j = 1; j <= radial_waves; ++j)
        s += coef[static_cast<std::size_t>(j)] * std::sin(j * kPi * u);
      mode[i] = std::exp(-grid.r[i] * grid.r[i] / 6.0) * s;
    }
    f.set_mode(k, mode);
  }
  return f;
}

}  // namespace arnold
