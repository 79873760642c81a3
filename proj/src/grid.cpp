#include "arnold/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace arnold {

std::string to_string(Mapping m) {
  switch (m) {
    case Mapping::uniform_r: return "uniform_r";
    case Mapping::log_r: return "log_r";
    case Mapping::uniform_s: return "uniform_s";
  }
  return "?";
}

Mapping mapping_from_string(const std::string& s) {
  if (s == "uniform_r") return Mapping::uniform_r;
  if (s == "log_r") return Mapping::log_r;
  if (s == "uniform_s") return Mapping::uniform_s;
  throw std::invalid_argument("unknown grid mapping: " + s);
}

double RadialGrid::integrate(const Vec& f) const {
  if (f.size() != r.size())
    throw std::invalid_argument("integrate: size mismatch");
  double acc = 0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += f[i] * w[i];
  return acc;
}

Cplx RadialGrid::integrate(const CVec& f) const {
  if (f.size() != r.size())
    throw std::invalid_argument("integrate: size mismatch");
  Cplx acc = 0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += f[i] * w[i];
  return acc;
}

RadialGrid make_grid(std::size_t N, double r_max, Mapping mapping,
                     double r_min) {
  if (N < 16) throw std::invalid_argument("make_grid: need N >= 16");
  if (!(r_max > 0)) throw std::invalid_argument("make_grid: need r_max > 0");
  RadialGrid g;
  g.mapping = mapping;
  g.r_max = r_max;
  g.r.resize(N);
  g.w.resize(N);
  switch (mapping) {
    case Mapping::uniform_r: {
      const double h = r_max / double(N - 1);
      Vec sw = simpson_weights(N, h);
      for (std::size_t i = 0; i < N; ++i) {
        g.r[i] = double(i) * h;
        g.w[i] = sw[i] * g.r[i];
      }
      g.r_min = 0.0;
      break;
    }
    case Mapping::log_r: {
      if (r_min <= 0) r_min = std::max(1e-4, 1e-7 * r_max);
      if (!(r_min < r_max))
        throw std::invalid_argument("make_grid: need r_min < r_max");
      const double t0 = std::log(r_min), t1 = std::log(r_max);
      const double h = (t1 - t0) / double(N - 1);
      Vec sw = simpson_weights(N, h);
      for (std::size_t i = 0; i < N; ++i) {
        g.r[i] = std::exp(t0 + double(i) * h);
        // dr = r dt, and one more r for the radial measure.
        g.w[i] = sw[i] * g.r[i] * g.r[i];
      }
      g.r[N - 1] = r_max;  // pin the endpoint exactly
      g.r_min = r_min;
      break;
    }
    case Mapping::uniform_s: {
      const double s_max = r_max * r_max / 4;
      const double h = s_max / double(N - 1);
      Vec sw = simpson_weights(N, h);
      for (std::size_t i = 0; i < N; ++i) {
        g.r[i] = 2 * std::sqrt(double(i) * h);
        // r dr = 2 ds
        g.w[i] = 2 * sw[i];
      }
      g.r_min = 0.0;
      break;
    }
  }
  return g;
}

CVec PolarField::mode(int k) const {
  auto it = modes.find(k);
  if (it != modes.end()) return it->second;
  if (reality) {
    auto jt = modes.find(-k);
    if (jt != modes.end()) {
      CVec out(jt->second.size());
      for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = std::conj(jt->second[i]);
      return out;
    }
  }
  return CVec(grid.size(), Cplx(0, 0));
}

void PolarField::set_mode(int k, CVec values) {
  if (values.size() != grid.size())
    throw std::invalid_argument("set_mode: size mismatch with grid");
  if (reality && k == 0) {
    for (auto& v : values) v = Cplx(v.real(), 0.0);
  }
  if (reality && k != 0) {
    CVec conj_vals(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
      conj_vals[i] = std::conj(values[i]);
    modes[-k] = std::move(conj_vals);
  }
  modes[k] = std::move(values);
}

int PolarField::max_mode() const {
  int m = 0;
  for (const auto& [k, v] : modes) m = std::max(m, std::abs(k));
  return m;
}

double PolarField::x_norm_sq(const Profile& profile) const {
  Vec A = profile.weight_A(grid.r);
  double acc = 0;
  for (const auto& [k, v] : modes) {
    double mode_acc = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
      mode_acc += A[i] * std::norm(v[i]) * grid.w[i];
    acc += mode_acc;
  }
  return 2 * kPi * acc;
}

namespace {

/// Radial derivative of sampled mode values by centered differences
/// (one-sided second order at the ends), on a possibly nonuniform grid.
CVec radial_derivative(const Vec& r, const CVec& f) {
  const std::size_t n = r.size();
  CVec d(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0) {
      const double h1 = r[1] - r[0], h2 = r[2] - r[1];
      d[0] = (-(2 * h1 + h2) / (h1 * (h1 + h2))) * f[0] +
             ((h1 + h2) / (h1 * h2)) * f[1] -
             (h1 / (h2 * (h1 + h2))) * f[2];
    } else if (i == n - 1) {
      const double h1 = r[n - 2] - r[n - 3], h2 = r[n - 1] - r[n - 2];
      d[n - 1] = (h2 / (h1 * (h1 + h2))) * f[n - 3] -
                 ((h1 + h2) / (h1 * h2)) * f[n - 2] +
                 ((h1 + 2 * h2) / (h2 * (h1 + h2))) * f[n - 1];
    } else {
      const double h1 = r[i] - r[i - 1], h2 = r[i + 1] - r[i];
      d[i] = (-h2 / (h1 * (h1 + h2))) * f[i - 1] +
             ((h2 - h1) / (h1 * h2)) * f[i] +
             (h1 / (h2 * (h1 + h2))) * f[i + 1];
    }
  }
  return d;
}

}  // namespace

double PolarField::grad_norm_sq(const Profile& profile) const {
  Vec A = profile.weight_A(grid.r);
  double acc = 0;
  for (const auto& [k, v] : modes) {
    CVec dv = radial_derivative(grid.r, v);
    double mode_acc = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      double ang = 0;
      if (k != 0) {
        const double r = grid.r[i];
        // k^2 |f|^2 / r^2; at the axis a nonzero mode value is not in the
        // form domain, so weight_A there is paired with a zero quadrature
        // weight on uniform_r grids. Guard the division anyway.
        ang = r > 0 ? double(k) * double(k) * std::norm(v[i]) / (r * r) : 0.0;
      }
      mode_acc += A[i] * (std::norm(dv[i]) + ang) * grid.w[i];
    }
    acc += mode_acc;
  }
  return 2 * kPi * acc;
}

Moments moments(const PolarField& field) {
  Moments m;
  const RadialGrid& g = field.grid;
  const CVec w0 = field.mode(0);
  const CVec w1 = field.mode(1);
  double M0 = 0, M1 = 0, M2 = 0, I = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    M0 += w0[i].real() * g.w[i];
    I += g.r[i] * g.r[i] * w0[i].real() * g.w[i];
    M1 += g.r[i] * w1[i].real() * g.w[i];
    M2 -= g.r[i] * w1[i].imag() * g.w[i];
  }
  m.M0 = 2 * kPi * M0;
  m.M1 = 2 * kPi * M1;
  m.M2 = 2 * kPi * M2;
  m.I = 2 * kPi * I;
  return m;
}

PolarField project_constraints(const PolarField& field,
                               const std::set<Constraint>& which,
                               const Profile& profile) {
  PolarField out = field;
  const RadialGrid& g = field.grid;
  const std::size_t n = g.size();
  Vec A = profile.weight_A(g.r);
  if (which.count(Constraint::mass)) {
    // Direction A^{-1} in the A-weighted inner product represents the
    // plain integral functional on the k = 0 mode.
    CVec w0 = out.mode(0);
    Cplx num = 0;
    double den = 0;
    for (std::size_t i = 0; i < n; ++i) {
      num += w0[i] * g.w[i];
      den += (1.0 / A[i]) * g.w[i];
    }
    const Cplx c = num / den;
    for (std::size_t i = 0; i < n; ++i) w0[i] -= c / A[i];
    out.set_mode(0, std::move(w0));
  }
  if (which.count(Constraint::angular_first)) {
    // Functionals INT (x_j/|x|) omega dx live on the |k| = 1 modes with
    // radial weight 1; the A-orthogonal direction is A^{-1}.
    double den = 0;
    for (std::size_t i = 0; i < n; ++i) den += (1.0 / A[i]) * g.w[i];
    for (int k : {1, -1}) {
      if (field.reality && k == -1) break;  // conjugate tracks k = +1
      CVec w1 = out.mode(k);
      Cplx num = 0;
      for (std::size_t i = 0; i < n; ++i) num += w1[i] * g.w[i];
      const Cplx c = num / den;
      for (std::size_t i = 0; i < n; ++i) w1[i] -= c / A[i];
      out.set_mode(k, std::move(w1));
    }
  }
  if (which.count(Constraint::linear_first)) {
    if (!(profile.beta() > 4))
      throw std::invalid_argument(
          "project_constraints: linear_first needs weight growth beta > 4");
    // Functionals INT x_j omega dx: radial weight r on |k| = 1,
    // A-orthogonal direction r/A.
    double den = 0;
    for (std::size_t i = 0; i < n; ++i)
      den += (g.r[i] * g.r[i] / A[i]) * g.w[i];
    for (int k : {1, -1}) {
      if (field.reality && k == -1) break;
      CVec w1 = out.mode(k);
      Cplx num = 0;
      for (std::size_t i = 0; i < n; ++i) num += g.r[i] * w1[i] * g.w[i];
      const Cplx c = num / den;
      for (std::size_t i = 0; i < n; ++i) w1[i] -= c * g.r[i] / A[i];
      out.set_mode(k, std::move(w1));
    }
  }
  return out;
}

std::string field_to_csv(const PolarField& field) {
  std::ostringstream os;
  os.precision(12);
  os << "k,r,re,im\n";
  for (const auto& [k, v] : field.modes) {
    for (std::size_t i = 0; i < v.size(); ++i)
      os << k << ',' << field.grid.r[i] << ',' << v[i].real() << ','
         << v[i].imag() << '\n';
  }
  return os.str();
}

}  // namespace arnold
