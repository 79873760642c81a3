#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "arnold/energy.hpp"

namespace arnold {

namespace {

/// Nodal stream function of a radial field by the same symmetric log-kernel
/// sums that define energy_radial, so E = -pi sum_i omega_i w_i psi_i is an
/// exact identity between the two.
Vec nodal_stream(const RadialGrid& g, const Vec& om) {
  const std::size_t n = g.size();
  Vec a(n), psi(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) a[i] = om[i] * g.w[i];
  double c = 0;
  for (std::size_t i = 0; i < n; ++i) {
    c += a[i];
    psi[i] = c > 0 ? std::log(g.r[i]) * c : 0.0;
  }
  double d = 0;
  for (std::size_t i = n; i-- > 0;) {
    psi[i] += d;
    if (a[i] != 0) d += std::log(g.r[i]) * a[i];
  }
  return psi;
}

double mass_of(const RadialGrid& g, const Vec& om) {
  double s = 0;
  for (std::size_t i = 0; i < g.size(); ++i) s += om[i] * g.w[i];
  return 2 * kPi * s;
}

/// Exact symmetric-decreasing rearrangement of the sorted cell staircase:
/// cells are ranked by value, laid out from the centre by area, and each
/// node reads the staircase at its own area midpoint.
Vec staircase_rearrange(const RadialGrid& g, const Vec& om) {
  const std::size_t n = g.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return om[a] > om[b]; });
  Vec vals, mid;
  vals.reserve(n);
  mid.reserve(n);
  double cum = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double area = 2 * kPi * g.w[order[j]];
    if (area <= 0) continue;
    vals.push_back(om[order[j]]);
    mid.push_back(cum + 0.5 * area);
    cum += area;
  }
  Vec out(n, 0.0);
  if (vals.empty()) return out;
  double owncum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double area = 2 * kPi * g.w[i];
    const double target = owncum + 0.5 * area;
    owncum += area;
    if (target <= mid.front()) {
      out[i] = vals.front();
      continue;
    }
    if (target >= mid.back()) {
      out[i] = 0.0;
      continue;
    }
    std::size_t lo = 0, hi = mid.size() - 1;
    while (hi - lo > 1) {
      const std::size_t c = (lo + hi) / 2;
      if (mid[c] <= target)
        lo = c;
      else
        hi = c;
    }
    const double f = (target - mid[lo]) / (mid[hi] - mid[lo]);
    out[i] = vals[lo] + f * (vals[hi] - vals[lo]);
  }
  return out;
}

/// omega_lambda(r) = lambda^2 omega(lambda r) by interpolation in the grid's
/// natural coordinate (log r on log grids, r otherwise); mass-preserving in
/// the continuum.
Vec dilate(const RadialGrid& g, const Vec& om, double lam) {
  const std::size_t n = g.size();
  const bool in_log = g.mapping == Mapping::log_r;
  Vec x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = in_log ? std::log(g.r[i]) : g.r[i];
  const double shift = std::log(lam);
  Vec out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double q = in_log ? x[i] + shift : g.r[i] * lam;
    double v;
    if (q <= x.front())
      v = om.front();
    else if (q >= x.back())
      v = 0.0;
    else {
      std::size_t lo = 0, hi = n - 1;
      while (hi - lo > 1) {
        const std::size_t c = (lo + hi) / 2;
        if (x[c] <= q)
          lo = c;
        else
          hi = c;
      }
      const double f = (q - x[lo]) / (x[hi] - x[lo]);
      v = om[lo] + f * (om[hi] - om[lo]);
    }
    out[i] = lam * lam * v;
  }
  return out;
}

}  // namespace

MaximizeResult maximize_free_energy(const EntropyFunction& entropy, double M,
                                    const RadialGrid& grid,
                                    std::uint64_t seed) {
  if (!(M > 0))
    throw std::invalid_argument("maximize_free_energy: mass must be positive");
  if (!entropy.Phi || !entropy.phi)
    throw std::invalid_argument(
        "maximize_free_energy: entropy needs both Phi and phi");
  if (entropy.hyp_constants &&
      entropy.hyp_constants(M).verdict == HypVerdict::violated)
    throw std::invalid_argument(
        "maximize_free_energy: growth condition fails at this mass");

  const std::size_t n = grid.size();
  if (n < 2)
    throw std::invalid_argument("maximize_free_energy: grid too small");

  auto renorm = [&](Vec& om) {
    const double m0 = mass_of(grid, om);
    if (!(m0 > 0))
      throw std::runtime_error("maximize_free_energy: candidate lost its mass");
    const double s = M / m0;
    for (double& v : om) v *= s;
  };
  auto entropy_of = [&](const Vec& om) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (grid.w[i] > 0) s += entropy.Phi(std::max(om[i], 0.0)) * grid.w[i];
    return 2 * kPi * s;
  };
  auto free_energy_of = [&](const Vec& om, const Vec& psi) {
    double e = 0;
    for (std::size_t i = 0; i < n; ++i) e += om[i] * grid.w[i] * psi[i];
    return -kPi * e + entropy_of(om);
  };

  // Start from the mass-M gaussian bump, optionally roughened by a positive
  // band-limited factor so distinct seeds explore distinct basins.
  Vec om(n);
  for (std::size_t i = 0; i < n; ++i)
    om[i] = std::exp(-grid.r[i] * grid.r[i] / 4);
  if (seed != 0) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    Vec ca(7), sa(7);
    for (int j = 1; j <= 6; ++j) {
      ca[j] = nd(gen);
      sa[j] = nd(gen);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double u = double(i) / double(n - 1);
      double p = 0;
      for (int j = 1; j <= 6; ++j)
        p += (ca[j] * std::cos(2 * kPi * j * u) +
              sa[j] * std::sin(2 * kPi * j * u)) /
             j;
      om[i] *= std::exp(0.25 * p);
    }
    om = staircase_rearrange(grid, om);
  }
  renorm(om);
  Vec psi = nodal_stream(grid, om);
  double F = free_energy_of(om, psi);
  const double f0 = F;
  if (!std::isfinite(F))
    throw std::runtime_error("maximize_free_energy: start free energy not finite");

  // Dilation response: d/dlog(lambda) of the first-order optimality mismatch
  // is M/(2 pi) - 1/(2 kappa (kappa - 1)) for the algebraic entropies;
  // gaussian-type entropies use a unit response with tighter clamps.
  const bool algebraic = entropy.kind == EntropyKind::algebraic_kappa;
  double resp = 1.0;
  double lam_lo = 0.6, lam_hi = 1.6;
  if (algebraic) {
    resp = M / (2 * kPi) - 1 / (2 * entropy.kappa * (entropy.kappa - 1));
    if (std::abs(resp) < 0.05) resp = resp < 0 ? -0.05 : 0.05;
    lam_lo = 0.5;
    lam_hi = 2.0;
  }

  auto mismatch = [&](const Vec& omv, const Vec& psiv, Vec& d) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < n; ++i) {
      d[i] = entropy.phi(std::max(omv[i], 1e-300)) - psiv[i];
      num += d[i] * omv[i] * grid.w[i];
      den += omv[i] * grid.w[i];
    }
    return num / den;
  };

  Vec d(n), t(n), cand(n);
  double eta = 0.5;
  bool converged = false;
  int iters = 0;
  for (int it = 1; it <= 10000; ++it) {
    iters = it;
    double c = mismatch(om, psi, d);

    if (std::abs(c) > 1e-9) {
      const double lam =
          std::clamp(std::exp(-c / resp), lam_lo, lam_hi);
      Vec omd = dilate(grid, om, lam);
      renorm(omd);
      Vec psid = nodal_stream(grid, omd);
      const double fd = free_energy_of(omd, psid);
      Vec dd(n);
      const double cd = mismatch(omd, psid, dd);
      if (fd >= F - 1e-11 * (1 + std::abs(F)) && std::abs(cd) < std::abs(c)) {
        om.swap(omd);
        psi.swap(psid);
        d.swap(dd);
        F = fd;
        c = cd;
      }
    }

    // Ascent direction: push toward phi(omega) = psi, per-node limited to
    // stay inside the concavity region, then fill from the stationarity
    // envelope phi^{-1}(psi) where the field is far below it.
    for (std::size_t i = 0; i < n; ++i) {
      const double lim =
          std::min({eta, 8 * om[i], 0.25 * om[i] / std::max(std::abs(d[i]), 1e-300)});
      t[i] = d[i] * lim;
    }
    if (entropy.phi_inverse) {
      const double fill = std::min(eta, 0.9);
      for (std::size_t i = 0; i < n; ++i) {
        double env = entropy.phi_inverse(std::clamp(psi[i], -700.0, 700.0));
        env = std::min(env, 1e30);
        if (env > om[i]) t[i] = std::max(t[i], fill * (env - om[i]));
      }
    }
    for (std::size_t i = 0; i < n; ++i) cand[i] = std::max(om[i] + t[i], 0.0);
    cand = staircase_rearrange(grid, cand);
    renorm(cand);
    const Vec psic = nodal_stream(grid, cand);
    const double fc = free_energy_of(cand, psic);

    if (fc > F) {  // NaN candidates fall through to the rejection branch
      const double gain = fc - F;
      om = cand;
      psi = psic;
      F = fc;
      if (F > 1e15 * (1 + std::abs(f0)))
        throw std::runtime_error(
            "maximize_free_energy: free energy diverges (growth condition?)");
      if (gain <= 1e-10 * (1 + std::abs(fc))) {
        converged = true;
        break;
      }
      eta = std::min(eta * 1.3, 4.0);
    } else {
      eta /= 2;
      if (eta < 1e-15) {
        converged = true;
        break;
      }
    }
  }

  MaximizeResult out;
  out.omega = om;
  out.psi = nodal_stream(grid, om);
  out.residual.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out.residual[i] =
        entropy.phi(std::max(om[i], 1e-300)) - out.psi[i];
  out.E = energy_radial(om, grid);
  out.S = entropy_of(om);
  out.F = out.E + out.S;
  out.M = mass_of(grid, om);
  out.iterations = iters;
  out.converged = converged;
  return out;
}

std::string MaximizeResult::to_json() const {
  std::ostringstream os;
  os.precision(12);
  os << "{\"F\": " << F << ", \"E\": " << E << ", \"S\": " << S
     << ", \"M\": " << M << ", \"iterations\": " << iterations
     << ", \"converged\": " << (converged ? "true" : "false") << "}";
  return os.str();
}

std::string MaximizeResult::to_csv(const RadialGrid& grid) const {
  if (grid.size() != omega.size())
    throw std::invalid_argument("MaximizeResult::to_csv: grid size mismatch");
  std::ostringstream os;
  os.precision(12);
  os << "r,omega,psi,phi_prime_residual\n";
  for (std::size_t i = 0; i < omega.size(); ++i)
    os << grid.r[i] << ',' << omega[i] << ',' << psi[i] << ','
       << residual[i] << '\n';
  return os.str();
}

}  // namespace arnold
