#include "arnold/evolve.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "arnold/numerics.hpp"

namespace arnold {

namespace {

/// Thomas factorization of a real tridiagonal matrix, reused across steps
/// at a fixed dt.
struct TriFactor {
  Vec lo;   ///< sub-diagonal of the system matrix
  Vec cp;   ///< forward-eliminated super-diagonal
  Vec inv;  ///< reciprocal pivots
};

TriFactor factor_tridiag(const Vec& lo, const Vec& di, const Vec& up) {
  const std::size_t n = di.size();
  TriFactor f;
  f.lo = lo;
  f.cp.resize(n);
  f.inv.resize(n);
  f.inv[0] = 1.0 / di[0];
  f.cp[0] = up[0] * f.inv[0];
  for (std::size_t i = 1; i < n; ++i) {
    f.inv[i] = 1.0 / (di[i] - lo[i] * f.cp[i - 1]);
    f.cp[i] = up[i] * f.inv[i];
  }
  return f;
}

void solve_tridiag(const TriFactor& f, CVec& x) {
  const std::size_t n = x.size();
  x[0] *= f.inv[0];
  for (std::size_t i = 1; i < n; ++i)
    x[i] = (x[i] - f.lo[i] * x[i - 1]) * f.inv[i];
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= f.cp[i] * x[i + 1];
}

}  // namespace

struct Simulator::Impl {
  std::size_t N = 0;
  double rmax = 0, h = 0;
  int K = 0;
  double al = 0;
  bool no_diff = false, no_cubic = false;
  std::size_t M = 0;  ///< angular collocation count, alias-free products

  Vec r, V, rf, logr;  // cell centers, volumes, face radii (N+1), log r
  // Oseen background on the mesh: vorticity slope, stream slope, and the
  // derived weights A_h = -psi_b'/omega_b', Omega = psi_b'/r, c_b = omega_b'/r.
  Vec wbp, psibp, Ah, Om, cb;
  // Biot-Savart sweep tables per azimuthal index k >= 1.
  std::vector<Vec> a_up;  ///< r_j^{k+1} h
  std::vector<Vec> b_dn;  ///< r_j^{1-k} h
  std::vector<Vec> s_dn;  ///< r_i^{-k}
  std::vector<Vec> s_up;  ///< r_i^{k}
  std::vector<Vec> d_dn;  ///< r_i^{-k-1}
  std::vector<Vec> d_up;  ///< r_i^{k-1}
  RadialGrid gv;
  // diffusion tridiagonal per mode
  std::vector<Vec> Llo, Ldi, Lup;
  mutable std::map<std::pair<int, std::uint64_t>, TriFactor> fcache;

  using Modes = std::vector<CVec>;  // index 0..K
  struct Streams {
    Modes psi, dpsi;
  };

  Impl(std::size_t N_, double rmax_, int K_, double alpha_, bool nd, bool nc)
      : N(N_), rmax(rmax_), K(K_), al(alpha_), no_diff(nd), no_cubic(nc) {
    if (N < 8) throw std::invalid_argument("Simulator: N too small");
    if (rmax <= 0)
      throw std::invalid_argument("Simulator: r_max must be positive");
    if (K < 0) throw std::invalid_argument("Simulator: K_max must be >= 0");
    h = rmax / double(N);
    M = collocation_count(K);
    r.resize(N);
    V.resize(N);
    logr.resize(N);
    rf.resize(N + 1);
    for (std::size_t i = 0; i < N; ++i) {
      r[i] = (double(i) + 0.5) * h;
      V[i] = r[i] * h;
      logr[i] = std::log(r[i]);
    }
    for (std::size_t j = 0; j <= N; ++j) rf[j] = double(j) * h;

    const int ktab = std::max(K, 1);
    a_up.resize(std::size_t(ktab) + 1);
    b_dn.resize(std::size_t(ktab) + 1);
    s_dn.resize(std::size_t(ktab) + 1);
    s_up.resize(std::size_t(ktab) + 1);
    d_dn.resize(std::size_t(ktab) + 1);
    d_up.resize(std::size_t(ktab) + 1);
    for (int k = 1; k <= ktab; ++k) {
      auto& au = a_up[std::size_t(k)];
      auto& bd = b_dn[std::size_t(k)];
      auto& sd = s_dn[std::size_t(k)];
      auto& su = s_up[std::size_t(k)];
      auto& dd = d_dn[std::size_t(k)];
      auto& du = d_up[std::size_t(k)];
      au.resize(N);
      bd.resize(N);
      sd.resize(N);
      su.resize(N);
      dd.resize(N);
      du.resize(N);
      for (std::size_t i = 0; i < N; ++i) {
        au[i] = std::pow(r[i], k + 1) * h;
        bd[i] = std::pow(r[i], 1 - k) * h;
        sd[i] = std::pow(r[i], -k);
        su[i] = std::pow(r[i], k);
        dd[i] = std::pow(r[i], -k - 1);
        du[i] = std::pow(r[i], k - 1);
        if (!std::isfinite(au[i]) || !std::isfinite(bd[i]) ||
            !std::isfinite(sd[i]) || !std::isfinite(dd[i]))
          throw std::invalid_argument(
              "Simulator: r^k sweep tables overflow at this (N, r_max, K)");
      }
    }

    // background vortex of unit circulation
    wbp.resize(N);
    psibp.resize(N);
    Ah.resize(N);
    Om.resize(N);
    cb.resize(N);
    CVec mwbp(N);
    for (std::size_t i = 0; i < N; ++i) {
      const double s = r[i] * r[i] / 4.0;
      wbp[i] = -(r[i] / (8.0 * kPi)) * std::exp(-s);
      mwbp[i] = -wbp[i];
    }
    CVec ps(N), dps(N);
    stream_pair_k(1, mwbp, ps, dps);
    // stream_pair_k solves with the psi = -B_k convention; psi_b' solves the
    // same k = 1 problem with source -omega_b', i.e. psi_b' = -B_1[omega_b'].
    for (std::size_t i = 0; i < N; ++i) {
      psibp[i] = -ps[i].real();
      Ah[i] = psibp[i] / (-wbp[i]);
      Om[i] = psibp[i] / r[i];
      cb[i] = wbp[i] / r[i];
      if (!std::isfinite(Ah[i]) || Ah[i] <= 0)
        throw std::invalid_argument("Simulator: background weight not positive");
    }

    gv.r = r;
    gv.w = V;
    gv.r_max = rmax;
    gv.r_min = r[0];
    gv.mapping = Mapping::uniform_r;

    // 𝓛_k in flux form: diffusive face flux rf (w_i - w_{i-1})/h, conservative
    // drift flux with face-averaged g = r^2 w / 2 (this carries both the
    // (r/2) d/dr and the +1 of the rescaled operator), homogeneous Dirichlet
    // ghost at the outer face, and the centrifugal diagonal -k^2/r^2.
    Llo.resize(std::size_t(K) + 1);
    Ldi.resize(std::size_t(K) + 1);
    Lup.resize(std::size_t(K) + 1);
    for (int k = 0; k <= K; ++k) {
      Vec lo(N, 0.0), di(N, 0.0), up(N, 0.0);
      for (std::size_t i = 0; i < N; ++i) {
        if (i + 1 < N) {
          di[i] += (-rf[i + 1] / h + r[i] * r[i] / 4.0) / V[i];
          up[i] += (rf[i + 1] / h + r[i + 1] * r[i + 1] / 4.0) / V[i];
        } else {
          di[i] += (-2.0 * rf[N] / h + r[i] * r[i] / 4.0) / V[i];
        }
        if (i > 0) {
          di[i] -= (rf[i] / h + r[i] * r[i] / 4.0) / V[i];
          lo[i] -= (-rf[i] / h + r[i - 1] * r[i - 1] / 4.0) / V[i];
        }
        di[i] -= double(k) * double(k) / (r[i] * r[i]);
      }
      Llo[std::size_t(k)] = std::move(lo);
      Ldi[std::size_t(k)] = std::move(di);
      Lup[std::size_t(k)] = std::move(up);
    }
  }

  /// Stream and radial stream derivative of one mode. k = 0 uses the
  /// symmetric log kernel psi(r_i) = sum_j log(max(r_i, r_j)) w_j V_j;
  /// k >= 1 uses the symmetric two-sweep kernel of psi_k = -B_k[w_k].
  /// The own cell enters psi exactly once and dpsi with half weight from
  /// each sweep, which makes the own-cell term of dpsi cancel exactly.
  void stream_pair_k(int k, const CVec& w, CVec& psi, CVec& dpsi) const {
    psi.resize(N);
    dpsi.resize(N);
    if (k == 0) {
      CVec cum(N);
      Cplx c(0.0, 0.0);
      for (std::size_t i = 0; i < N; ++i) {
        c += w[i] * V[i];
        cum[i] = c;
      }
      Cplx d(0.0, 0.0);
      for (std::size_t i = N; i-- > 0;) {
        psi[i] = logr[i] * cum[i] + d;
        dpsi[i] = cum[i] / r[i];
        d += logr[i] * w[i] * V[i];
      }
      return;
    }
    const auto& au = a_up[std::size_t(k)];
    const auto& bd = b_dn[std::size_t(k)];
    const auto& sd = s_dn[std::size_t(k)];
    const auto& su = s_up[std::size_t(k)];
    const auto& dd = d_dn[std::size_t(k)];
    const auto& du = d_up[std::size_t(k)];
    CVec S1(N), S2(N);
    Cplx acc(0.0, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
      acc += au[i] * w[i];  // includes own cell
      S1[i] = acc;
    }
    acc = Cplx(0.0, 0.0);
    for (std::size_t i = N; i-- > 0;) {
      S2[i] = acc;  // excludes own cell
      acc += bd[i] * w[i];
    }
    const double c = 1.0 / (2.0 * double(k));
    for (std::size_t i = 0; i < N; ++i) {
      psi[i] = -c * (sd[i] * S1[i] + su[i] * S2[i]);
      dpsi[i] = 0.5 * (dd[i] * (S1[i] - 0.5 * au[i] * w[i]) -
                       du[i] * (S2[i] + 0.5 * bd[i] * w[i]));
    }
  }

  Streams all_streams(const Modes& w) const {
    Streams st;
    st.psi.resize(std::size_t(K) + 1);
    st.dpsi.resize(std::size_t(K) + 1);
    for (int k = 0; k <= K; ++k)
      stream_pair_k(k, w[std::size_t(k)], st.psi[std::size_t(k)],
                    st.dpsi[std::size_t(k)]);
    return st;
  }

  void apply_L(int k, const CVec& w, CVec& out) const {
    out.assign(N, Cplx(0.0, 0.0));
    if (no_diff) return;
    const Vec& lo = Llo[std::size_t(k)];
    const Vec& di = Ldi[std::size_t(k)];
    const Vec& up = Lup[std::size_t(k)];
    for (std::size_t i = 0; i < N; ++i) {
      Cplx s = di[i] * w[i];
      if (i > 0) s += lo[i] * w[i - 1];
      if (i + 1 < N) s += up[i] * w[i + 1];
      out[i] = s;
    }
  }

  const TriFactor& factor(int k, double dt) const {
    const auto key = std::make_pair(k, std::bit_cast<std::uint64_t>(dt));
    auto it = fcache.find(key);
    if (it != fcache.end()) return it->second;
    const Vec& lo = Llo[std::size_t(k)];
    const Vec& di = Ldi[std::size_t(k)];
    const Vec& up = Lup[std::size_t(k)];
    Vec alo(N), adi(N), aup(N);
    for (std::size_t i = 0; i < N; ++i) {
      alo[i] = -0.5 * dt * lo[i];
      adi[i] = 1.0 - 0.5 * dt * di[i];
      aup[i] = -0.5 * dt * up[i];
    }
    return fcache.emplace(key, factor_tridiag(alo, adi, aup)).first->second;
  }

  /// alpha (Omega w_k - c_b psi_k) d/dtheta term plus the dealiased
  /// self-advection, accumulated into e.
  Modes explicit_terms(const Modes& w, const Streams& st) const {
    Modes e(std::size_t(K) + 1, CVec(N, Cplx(0.0, 0.0)));
    if (al != 0.0) {
      for (int k = 1; k <= K; ++k) {
        const Cplx mika(0.0, -double(k) * al);
        const CVec& wk = w[std::size_t(k)];
        const CVec& pk = st.psi[std::size_t(k)];
        CVec& ek = e[std::size_t(k)];
        for (std::size_t i = 0; i < N; ++i)
          ek[i] = mika * (Om[i] * wk[i] - cb[i] * pk[i]);
      }
    }
    if (!no_cubic) add_nl(w, st, e);
    return e;
  }

  /// -div(u w) with u = grad^perp psi: conservative radial face fluxes of
  /// the analyzed product u_r w and the spectral angular derivative of
  /// u_theta w. Products are formed pointwise on the collocation circle.
  void add_nl(const Modes& w, const Streams& st, Modes& e) const {
    std::vector<CVec> frm(std::size_t(K) + 1, CVec(N));
    std::vector<CVec> ftm(std::size_t(K) + 1, CVec(N));
    CVec roww(std::size_t(K) + 1), rowu(std::size_t(K) + 1),
        rowt(std::size_t(K) + 1);
    Vec fr(M), ft(M);
    for (std::size_t i = 0; i < N; ++i) {
      for (int k = 0; k <= K; ++k) {
        const std::size_t ku = std::size_t(k);
        roww[ku] = w[ku][i];
        rowu[ku] = k == 0 ? Cplx(0.0, 0.0)
                          : Cplx(0.0, -double(k) / r[i]) * st.psi[ku][i];
        rowt[ku] = st.dpsi[ku][i];
      }
      const Vec vw = angular_synthesis(roww, M);
      const Vec vu = angular_synthesis(rowu, M);
      const Vec vt = angular_synthesis(rowt, M);
      for (std::size_t j = 0; j < M; ++j) {
        fr[j] = vw[j] * vu[j];
        ft[j] = vw[j] * vt[j];
      }
      const CVec cfr = angular_analysis(fr, K);
      const CVec cft = angular_analysis(ft, K);
      for (int k = 0; k <= K; ++k) {
        frm[std::size_t(k)][i] = cfr[std::size_t(k)];
        ftm[std::size_t(k)][i] = cft[std::size_t(k)];
      }
    }
    CVec F(N + 1);
    for (int k = 0; k <= K; ++k) {
      const CVec& fk = frm[std::size_t(k)];
      F[0] = Cplx(0.0, 0.0);
      F[N] = Cplx(0.0, 0.0);
      for (std::size_t j = 1; j < N; ++j)
        F[j] = rf[j] * 0.5 * (fk[j - 1] + fk[j]);
      CVec& ek = e[std::size_t(k)];
      const CVec& tk = ftm[std::size_t(k)];
      for (std::size_t i = 0; i < N; ++i)
        ek[i] -= (F[i + 1] - F[i]) / V[i] +
                 Cplx(0.0, double(k) / r[i]) * tk[i];
    }
  }

  Modes unpack(const PolarField& f) const {
    Modes w(std::size_t(K) + 1);
    for (int k = 0; k <= K; ++k) {
      w[std::size_t(k)] = f.mode(k);
      if (w[std::size_t(k)].size() != N)
        throw std::invalid_argument("Simulator: field not on the mesh");
    }
    return w;
  }

  PolarField pack(const Modes& w) const {
    PolarField f(gv);
    for (int k = 0; k <= K; ++k) f.set_mode(k, w[std::size_t(k)]);
    return f;
  }

  /// sum_k c_k Re<f_k, g_k> with the 2 pi V cell measure, c_k = 2 for the
  /// hermitian pairs k >= 1.
  double ip(const Modes& f, const Modes& g) const {
    double total = 0;
    for (int k = 0; k <= K; ++k) {
      const CVec& fk = f[std::size_t(k)];
      const CVec& gk = g[std::size_t(k)];
      double s = 0;
      for (std::size_t i = 0; i < N; ++i)
        s += (fk[i].real() * gk[i].real() + fk[i].imag() * gk[i].imag()) * V[i];
      total += (k == 0 ? 1.0 : 2.0) * s;
    }
    return 2.0 * kPi * total;
  }

  double xnorm_sq(const Modes& w) const {
    double total = 0;
    for (int k = 0; k <= K; ++k) {
      const CVec& wk = w[std::size_t(k)];
      double s = 0;
      for (std::size_t i = 0; i < N; ++i) s += Ah[i] * std::norm(wk[i]) * V[i];
      total += (k == 0 ? 1.0 : 2.0) * s;
    }
    return 2.0 * kPi * total;
  }

  struct DiagVals {
    double J = 0, Q = 0, Nv = 0;
  };

  DiagVals diag(const Modes& w, const Streams& st) const {
    Modes y(std::size_t(K) + 1, CVec(N));
    for (int k = 0; k <= K; ++k)
      for (std::size_t i = 0; i < N; ++i)
        y[std::size_t(k)][i] = Ah[i] * w[std::size_t(k)][i] +
                               st.psi[std::size_t(k)][i];
    DiagVals d;
    d.J = 0.5 * ip(y, w);
    if (!no_diff) {
      Modes Lw(std::size_t(K) + 1);
      for (int k = 0; k <= K; ++k)
        apply_L(k, w[std::size_t(k)], Lw[std::size_t(k)]);
      d.Q = -ip(y, Lw);
    }
    if (!no_cubic) {
      Modes nl(std::size_t(K) + 1, CVec(N, Cplx(0.0, 0.0)));
      add_nl(w, st, nl);
      d.Nv = -ip(y, nl);
    }
    return d;
  }
};

Simulator::Simulator(std::size_t N, double r_max, int K_max, double alpha,
                     bool no_diffusion, bool no_cubic)
    : impl_(std::make_unique<Impl>(N, r_max, K_max, alpha, no_diffusion,
                                   no_cubic)) {}

Simulator::~Simulator() = default;
Simulator::Simulator(Simulator&&) noexcept = default;
Simulator& Simulator::operator=(Simulator&&) noexcept = default;

const RadialGrid& Simulator::grid() const { return impl_->gv; }
int Simulator::k_max() const { return impl_->K; }
double Simulator::alpha() const { return impl_->al; }

EvolState Simulator::init_state(const PolarField& seed,
                                double x_norm_target) const {
  const Impl& im = *impl_;
  if (seed.grid.size() != im.N)
    throw std::invalid_argument("init_state: seed grid size mismatch");
  for (std::size_t i = 0; i < im.N; ++i)
    if (std::abs(seed.grid.r[i] - im.r[i]) > 1e-9 * im.rmax)
      throw std::invalid_argument("init_state: seed must live on the mesh");
  if (seed.max_mode() > im.K)
    throw std::invalid_argument("init_state: seed has modes beyond K_max");
  const PolarField proj = project_constraints(
      seed, {Constraint::mass, Constraint::linear_first}, gaussian_profile());
  Impl::Modes w = im.unpack(proj);
  const double xn = im.xnorm_sq(w);
  if (!std::isfinite(xn))
    throw std::invalid_argument("init_state: seed has no finite X-norm");
  if (x_norm_target > 0 && xn > 0) {
    const double sc = x_norm_target / std::sqrt(xn);
    for (auto& mk : w)
      for (auto& z : mk) z *= sc;
  }
  EvolState st;
  st.alpha = im.al;
  st.time = 0.0;
  st.field = im.pack(w);
  st.stream = im.pack(im.all_streams(w).psi);
  return st;
}

void Simulator::step(EvolState& state, double dt) const {
  const Impl& im = *impl_;
  if (!(dt > 0)) throw std::invalid_argument("step: dt must be positive");
  Impl::Modes w = im.unpack(state.field);
  const Impl::Streams s1 = im.all_streams(w);
  const Impl::Modes e1 = im.explicit_terms(w, s1);

  Impl::Modes Lw(std::size_t(im.K) + 1);
  for (int k = 0; k <= im.K; ++k)
    im.apply_L(k, w[std::size_t(k)], Lw[std::size_t(k)]);

  Impl::Modes ws(std::size_t(im.K) + 1);
  for (int k = 0; k <= im.K; ++k) {
    const std::size_t ku = std::size_t(k);
    CVec b(im.N);
    for (std::size_t i = 0; i < im.N; ++i)
      b[i] = w[ku][i] + 0.5 * dt * Lw[ku][i] + dt * e1[ku][i];
    if (!im.no_diff) solve_tridiag(im.factor(k, dt), b);
    ws[ku] = std::move(b);
  }

  const Impl::Streams s2 = im.all_streams(ws);
  const Impl::Modes e2 = im.explicit_terms(ws, s2);
  for (int k = 0; k <= im.K; ++k) {
    const std::size_t ku = std::size_t(k);
    CVec b(im.N);
    for (std::size_t i = 0; i < im.N; ++i)
      b[i] = w[ku][i] + 0.5 * dt * Lw[ku][i] +
             0.5 * dt * (e1[ku][i] + e2[ku][i]);
    if (!im.no_diff) solve_tridiag(im.factor(k, dt), b);
    w[ku] = std::move(b);
  }

  for (const auto& mk : w)
    for (const auto& z : mk)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw std::runtime_error(
            "step: field became non-finite (dt beyond the stability bound?)");

  state.field = im.pack(w);
  state.stream = im.pack(im.all_streams(w).psi);
  state.time += dt;
}

double Simulator::default_dt(const EvolState& state) const {
  const Impl& im = *impl_;
  const Impl::Modes w = im.unpack(state.field);
  const Impl::Streams st = im.all_streams(w);
  double umax = 0;
  for (std::size_t i = 0; i < im.N; ++i) {
    double u = std::abs(im.al) * std::abs(im.psibp[i]);
    for (int k = 0; k <= im.K; ++k) {
      const std::size_t ku = std::size_t(k);
      const double c = k == 0 ? 1.0 : 2.0;
      u += c * (std::abs(st.dpsi[ku][i]) +
                (k == 0 ? 0.0
                        : double(k) / im.r[i] * std::abs(st.psi[ku][i])));
    }
    umax = std::max(umax, u);
  }
  double dt = 0.25 * im.h * im.h;
  if (umax > 0) dt = std::min(dt, 0.5 / umax);
  return dt;
}

double Simulator::j_tilde(const EvolState& state) const {
  const Impl::Modes w = impl_->unpack(state.field);
  return impl_->diag(w, impl_->all_streams(w)).J;
}

double Simulator::q_tilde(const EvolState& state) const {
  const Impl::Modes w = impl_->unpack(state.field);
  return impl_->diag(w, impl_->all_streams(w)).Q;
}

double Simulator::n_tilde(const EvolState& state) const {
  const Impl::Modes w = impl_->unpack(state.field);
  return impl_->diag(w, impl_->all_streams(w)).Nv;
}

double Simulator::x_norm_sq(const EvolState& state) const {
  return impl_->xnorm_sq(impl_->unpack(state.field));
}

TrajectoryLog Simulator::run(EvolState& state, const RunParams& params) const {
  const Impl& im = *impl_;
  if (!(params.T > 0)) throw std::invalid_argument("run: T must be positive");
  double dt = params.dt > 0 ? params.dt : default_dt(state);
  long nsteps = std::lround(std::ceil(params.T / dt - 1e-9));
  if (nsteps < 1) nsteps = 1;
  dt = params.T / double(nsteps);
  const long stride = params.stride > 0 ? params.stride : 1;

  TrajectoryLog log;
  auto record = [&]() {
    const Impl::Modes w = im.unpack(state.field);
    const Impl::Streams st = im.all_streams(w);
    const Impl::DiagVals d = im.diag(w, st);
    const Moments mo = moments(state.field);
    log.times.push_back(state.time);
    log.J.push_back(d.J);
    log.Q.push_back(d.Q);
    log.N.push_back(d.Nv);
    log.xnorm.push_back(im.xnorm_sq(w));
    log.mass.push_back(mo.M0);
    log.M1.push_back(mo.M1);
    log.M2.push_back(mo.M2);
  };
  record();
  const double xn0 = log.xnorm[0];
  for (long n = 1; n <= nsteps; ++n) {
    step(state, dt);
    if (n % stride == 0 || n == nsteps) {
      record();
      const double xn = log.xnorm.back();
      if (!std::isfinite(xn))
        throw std::runtime_error("run: diagnostics became non-finite");
      if (xn0 > 0 && xn > 1e6 * xn0) {  // 10^3 x growth of the X-norm
        log.blew_up = true;
        log.blowup_time = state.time;
        break;
      }
    }
  }

  const std::size_t ns = log.times.size();
  log.residual.assign(ns, 0.0);
  for (std::size_t m = 1; m < ns; ++m) {
    const double dJ =
        (log.J[m] - log.J[m - 1]) / (log.times[m] - log.times[m - 1]);
    log.residual[m] = std::abs(dJ + 0.5 * (log.Q[m] + log.Q[m - 1]) +
                               0.5 * (log.N[m] + log.N[m - 1]));
  }

  // least-squares decay rate of log xnorm over the final half of the run
  const double thalf = 0.5 * log.times.back();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t cnt = 0;
  for (std::size_t m = 0; m < ns; ++m) {
    if (log.times[m] < thalf || log.xnorm[m] <= 0) continue;
    const double x = log.times[m], y = std::log(log.xnorm[m]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  if (cnt >= 2) {
    const double den = double(cnt) * sxx - sx * sx;
    if (den > 0) log.fitted_mu = -(double(cnt) * sxy - sx * sy) / den;
  }
  return log;
}

std::string TrajectoryLog::to_csv() const {
  std::ostringstream os;
  os.precision(12);
  os << "t,J,Q,N,xnorm,mass,M1,M2,residual\n";
  for (std::size_t m = 0; m < times.size(); ++m) {
    os << times[m] << ',' << J[m] << ',' << Q[m] << ',' << N[m] << ','
       << xnorm[m] << ',' << mass[m] << ',' << M1[m] << ',' << M2[m] << ','
       << residual[m] << '\n';
  }
  return os.str();
}

}  // namespace arnold
