#include "arnold/profiles.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace arnold {

std::string to_string(ProfileKind k) {
  switch (k) {
    case ProfileKind::gaussian: return "gaussian";
    case ProfileKind::algebraic: return "algebraic";
    case ProfileKind::custom: return "custom";
  }
  return "?";
}

/// Sampled-profile state: monotone interpolants of omega and of the
/// derived velocity weight, built once at construction.
struct Profile::CustomData {
  Pchip omega;
  Pchip weight;  // A(r) at the sample nodes
  double mass = 0.0;
  double beta_estimate = 0.0;
  double r_last = 0.0;
};

namespace {

// Series switch radius for the x = r^2 (gaussian: s = r^2/4) weight family.
constexpr double kSeriesX = 1e-2;

double gauss_A_s(double s) {
  if (s < kSeriesX)
    return 1.0 + s / 2 + s * s / 6 + s * s * s / 24 + s * s * s * s / 120 +
           s * s * s * s * s / 720;
  return std::expm1(s) / s;
}

double gauss_As_s(double s) {
  if (s < kSeriesX)
    return 0.5 + s / 3 + s * s / 8 + s * s * s / 30 + s * s * s * s / 144;
  return (std::exp(s) * (s - 1) + 1) / (s * s);
}

double gauss_Ass_s(double s) {
  if (s < kSeriesX)
    return 1.0 / 3 + s / 4 + s * s / 10 + s * s * s / 36 +
           s * s * s * s / 168;
  return (std::exp(s) * (s * s - 2 * s + 2) - 2) / (s * s * s);
}

// expm1(s)/s exceeds the double range once s is near 710, so the log-weight
// and curvature weights switch to ratio forms (A_s/A, A_ss/A, 1/A) that stay
// O(s) there.  They are algebraically identical to the direct expressions.
constexpr double kGaussBigS = 700.0;

double gauss_ratio_As_A(double s) {
  const double em = std::exp(-s);
  return ((s - 1) + em) / (s * (1 - em));
}

double gauss_ratio_Ass_A(double s) {
  const double em = std::exp(-s);
  return ((s * s - 2 * s + 2) - 2 * em) / (s * s * (1 - em));
}

double gauss_inv_A(double s) {
  if (s < kSeriesX) return 1.0 / gauss_A_s(s);
  return s * std::exp(-s) / (-std::expm1(-s));
}

}  // namespace

// x = r^2 evaluations of A and its x-derivatives for the base family.
double Profile::baseA_x(double x) const {
  switch (kind_) {
    case ProfileKind::gaussian:
      return gauss_A_s(x / 4);
    case ProfileKind::algebraic: {
      const double nu = kappa_ - 1;
      if (x < kSeriesX) {
        const double c0 = 1 / (4 * kappa_);
        const double c1 = (nu + 3) / (8 * (nu + 1));
        const double c2 = (nu + 2) / 24;
        const double c3 = (nu - 1) * (nu + 2) / 96;
        const double c4 = (nu - 2) * (nu - 1) * (nu + 2) / 480;
        const double c5 = (nu - 3) * (nu - 2) * (nu - 1) * (nu + 2) / 2880;
        return c0 + x * (c1 + x * (c2 + x * (c3 + x * (c4 + x * c5))));
      }
      const double L = std::log1p(x);
      const double y = 1 + x;
      return y * y * std::expm1(nu * L) / (4 * kappa_ * nu * x);
    }
    case ProfileKind::custom:
      break;
  }
  const double r = std::sqrt(x);
  return custom_->weight.eval(std::min(r, custom_->r_last));
}

double Profile::baseA_dx(double x) const {
  switch (kind_) {
    case ProfileKind::gaussian:
      return gauss_As_s(x / 4) / 4;
    case ProfileKind::algebraic: {
      const double nu = kappa_ - 1;
      if (x < kSeriesX) {
        const double c1 = (nu + 3) / (8 * (nu + 1));
        const double c2 = (nu + 2) / 24;
        const double c3 = (nu - 1) * (nu + 2) / 96;
        const double c4 = (nu - 2) * (nu - 1) * (nu + 2) / 480;
        const double c5 = (nu - 3) * (nu - 2) * (nu - 1) * (nu + 2) / 2880;
        return c1 + x * (2 * c2 + x * (3 * c3 + x * (4 * c4 + x * 5 * c5)));
      }
      const double y = 1 + x;
      const double E = std::expm1(nu * std::log1p(x));
      const double c = 4 * kappa_ * nu;
      // d/dx [ y^2 E / (c x) ]
      return (2 * y * E + nu * y * (E + 1)) / (c * x) - y * y * E / (c * x * x);
    }
    case ProfileKind::custom:
      break;
  }
  const double r = std::max(std::sqrt(x), 1e-12);
  return custom_->weight.deriv(std::min(r, custom_->r_last)) / (2 * r);
}

double Profile::baseA_dxx(double x) const {
  switch (kind_) {
    case ProfileKind::gaussian:
      return gauss_Ass_s(x / 4) / 16;
    case ProfileKind::algebraic: {
      const double nu = kappa_ - 1;
      if (x < kSeriesX) {
        const double c2 = (nu + 2) / 24;
        const double c3 = (nu - 1) * (nu + 2) / 96;
        const double c4 = (nu - 2) * (nu - 1) * (nu + 2) / 480;
        const double c5 = (nu - 3) * (nu - 2) * (nu - 1) * (nu + 2) / 2880;
        return 2 * c2 + x * (6 * c3 + x * (12 * c4 + x * 20 * c5));
      }
      const double y = 1 + x;
      const double E = std::expm1(nu * std::log1p(x));
      const double Ep = nu * (E + 1) / y;          // dE/dx
      const double Epp = nu * (nu - 1) * (E + 1) / (y * y);
      const double c = 4 * kappa_ * nu;
      const double n0 = y * y * E;
      const double n1 = 2 * y * E + y * y * Ep;
      const double n2 = 2 * E + 4 * y * Ep + y * y * Epp;
      return n2 / (c * x) - 2 * n1 / (c * x * x) + 2 * n0 / (c * x * x * x);
    }
    case ProfileKind::custom:
      break;
  }
  const double r = std::max(std::sqrt(x), 1e-12);
  const double rc = std::min(r, custom_->r_last);
  const double Ar = custom_->weight.deriv(rc);
  const double Arr = custom_->weight.deriv2(rc);
  // A_xx = (A'' - A'/r) / (4 r^2)
  return (Arr - Ar / r) / (4 * r * r);
}

double Profile::beta() const {
  switch (kind_) {
    case ProfileKind::gaussian:
      return std::numeric_limits<double>::infinity();
    case ProfileKind::algebraic:
      return 2 * kappa_;
    case ProfileKind::custom:
      return custom_->beta_estimate;
  }
  return 0;
}

double Profile::mass() const {
  switch (kind_) {
    case ProfileKind::gaussian:
      return amplitude_ * 4 * kPi / (lambda_ * lambda_);
    case ProfileKind::algebraic:
      return amplitude_ * kPi / (kappa_ - 1) / (lambda_ * lambda_);
    case ProfileKind::custom:
      return custom_->mass / (lambda_ * lambda_);
  }
  return 0;
}

double Profile::omega(double r) const {
  const double u = lambda_ * r;
  switch (kind_) {
    case ProfileKind::gaussian:
      return amplitude_ * std::exp(-u * u / 4);
    case ProfileKind::algebraic:
      return amplitude_ * std::exp(-kappa_ * std::log1p(u * u));
    case ProfileKind::custom:
      return u >= custom_->r_last ? custom_->omega.values().back()
                                  : custom_->omega.eval(u);
  }
  return 0;
}

double Profile::omega_prime(double r) const {
  const double u = lambda_ * r;
  switch (kind_) {
    case ProfileKind::gaussian:
      return lambda_ * amplitude_ * (-u / 2) * std::exp(-u * u / 4);
    case ProfileKind::algebraic:
      return lambda_ * amplitude_ * (-2 * kappa_ * u) *
             std::exp(-(kappa_ + 1) * std::log1p(u * u));
    case ProfileKind::custom:
      return lambda_ * (u >= custom_->r_last ? 0.0 : custom_->omega.deriv(u));
  }
  return 0;
}

double Profile::psi_prime(double r) const {
  if (r == 0) return 0.0;
  const double u = lambda_ * r;
  switch (kind_) {
    case ProfileKind::gaussian:
      return 2 * amplitude_ * (-std::expm1(-u * u / 4)) / u / lambda_;
    case ProfileKind::algebraic: {
      const double nu = kappa_ - 1;
      return -amplitude_ * std::expm1(-nu * std::log1p(u * u)) /
             (2 * nu * u) / lambda_;
    }
    case ProfileKind::custom: {
      if (u >= custom_->r_last)
        return custom_->mass / (2 * kPi * u) / lambda_;
      // psi' = C(r)/r = A * (-omega') by the defining relation of A.
      return weight_A(r) * (-omega_prime(r));
    }
  }
  return 0;
}

double Profile::weight_A(double r) const {
  const double u = lambda_ * r;
  return baseA_x(u * u) / (lambda_ * lambda_);
}

double Profile::weight_A_prime(double r) const {
  const double u = lambda_ * r;
  return 2 * u * baseA_dx(u * u) / lambda_;
}

double Profile::weight_B(double r) const {
  const double u = lambda_ * r;
  const double x = u * u;
  // B = 1 + A - A'/r; under dilation A picks up 1/lambda^2 while A'/r,
  // evaluated as 2 A_x in the squared coordinate, does not.
  return 1 + baseA_x(x) / (lambda_ * lambda_) - 2 * baseA_dx(x);
}

double Profile::chi(double r) const {
  const double u = lambda_ * r;
  const double x = u * u;
  if (kind_ == ProfileKind::gaussian && x / 4 >= kGaussBigS) {
    const double s = x / 4;
    return 0.5 * (s + std::log1p(-std::exp(-s)) - std::log(s)) -
           std::log(lambda_);
  }
  return 0.5 * std::log(baseA_x(x)) - std::log(lambda_);
}

double Profile::chi_prime(double r) const {
  const double u = lambda_ * r;
  const double x = u * u;
  if (kind_ == ProfileKind::gaussian && x / 4 >= kGaussBigS)
    return lambda_ * u * gauss_ratio_As_A(x / 4) / 4;
  return lambda_ * u * baseA_dx(x) / baseA_x(x);
}

double Profile::weight_V(double r) const {
  const double u = lambda_ * r;
  const double x = u * u;
  const double l2 = lambda_ * lambda_;
  if (kind_ == ProfileKind::gaussian && x / 4 >= kGaussBigS) {
    const double s = x / 4;
    const double p = gauss_ratio_As_A(s);
    const double q = gauss_ratio_Ass_A(s);
    return l2 * s * (q / 2 - p * p / 4);
  }
  const double A = baseA_x(x);
  const double Ax = baseA_dx(x);
  const double Axx = baseA_dxx(x);
  // V = x (2 A_xx A - A_x^2) / A^2 at the base scale, then V_l = l^2 V(u).
  return l2 * x * (2 * Axx * A - Ax * Ax) / (A * A);
}

double Profile::weight_W(double r) const {
  const double u = lambda_ * r;
  const double x = u * u;
  const double l2 = lambda_ * lambda_;
  if (kind_ == ProfileKind::gaussian && x / 4 >= kGaussBigS) {
    const double s = x / 4;
    const double p = gauss_ratio_As_A(s);
    const double q = gauss_ratio_Ass_A(s);
    const double Vb = s * (q / 2 - p * p / 4);
    const double Wb = Vb + p - 1 - gauss_inv_A(s);
    return l2 * Wb - 1 + l2;
  }
  const double A = baseA_x(x);
  const double Ax = baseA_dx(x);
  const double Axx = baseA_dxx(x);
  const double Vb = x * (2 * Axx * A - Ax * Ax) / (A * A);
  const double Bb = 1 + A - 2 * Ax;
  const double Wb = Vb + 2 * Ax / A - Bb / A;
  return l2 * Wb - 1 + l2;
}

Vec Profile::omega(const Vec& r) const {
  Vec out(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) out[i] = omega(r[i]);
  return out;
}
Vec Profile::omega_prime(const Vec& r) const {
  Vec out(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) out[i] = omega_prime(r[i]);
  return out;
}
Vec Profile::psi_prime(const Vec& r) const {
  Vec out(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) out[i] = psi_prime(r[i]);
  return out;
}
Vec Profile::weight_A(const Vec& r) const {
  Vec out(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) out[i] = weight_A(r[i]);
  return out;
}
Vec Profile::weight_B(const Vec& r) const {
  Vec out(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) out[i] = weight_B(r[i]);
  return out;
}
Vec Profile::weight_V(const Vec& r) const {
  Vec out(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) out[i] = weight_V(r[i]);
  return out;
}
Vec Profile::weight_W(const Vec& r) const {
  Vec out(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) out[i] = weight_W(r[i]);
  return out;
}

double Profile::support_radius(double floor) const {
  double lo = 0, hi = 1;
  for (int it = 0; it < 300 && omega(hi) > floor; ++it) hi *= 2;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (omega(mid) > floor)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

Profile gaussian_profile(double amplitude) {
  if (!(amplitude > 0))
    throw std::invalid_argument("gaussian_profile: amplitude must be positive");
  Profile p;
  p.kind_ = ProfileKind::gaussian;
  p.amplitude_ = amplitude;
  return p;
}

Profile algebraic_profile(double kappa, double amplitude) {
  if (!(kappa > 1))
    throw std::invalid_argument("algebraic_profile: need kappa > 1");
  if (!(amplitude > 0))
    throw std::invalid_argument("algebraic_profile: amplitude must be positive");
  Profile p;
  p.kind_ = ProfileKind::algebraic;
  p.amplitude_ = amplitude;
  p.kappa_ = kappa;
  return p;
}

Profile custom_profile(const Vec& r_samples, const Vec& omega_samples) {
  const std::size_t n = r_samples.size();
  if (n < 8 || omega_samples.size() != n)
    throw std::invalid_argument("custom_profile: need >= 8 matching samples");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(omega_samples[i] > 0))
      throw std::invalid_argument("custom_profile: omega must be positive");
    if (i > 0 && !(omega_samples[i] < omega_samples[i - 1]))
      throw std::invalid_argument("custom_profile: omega must strictly decrease");
  }
  auto data = std::make_shared<Profile::CustomData>();
  data->omega = Pchip(r_samples, omega_samples);
  // Cumulative mass C(r) on the sample nodes gives psi' = C/r and the
  // velocity weight A = -psi'/omega' = C / (r * (-omega')).
  Vec rw(n);
  for (std::size_t i = 0; i < n; ++i) rw[i] = r_samples[i] * omega_samples[i];
  Vec C = cumulative_integral(r_samples, rw);
  Vec Avals(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = r_samples[i];
    const double d = data->omega.deriv(r);
    if (r > 0 && d < 0) {
      Avals[i] = C[i] / (r * (-d));
    } else {
      Avals[i] = 0;  // patched below
    }
  }
  // Fill the origin (and any flat spots) by nearest valid continuation.
  for (std::size_t i = 0; i < n; ++i)
    if (Avals[i] == 0) {
      std::size_t j = i;
      while (j + 1 < n && Avals[j] == 0) ++j;
      Avals[i] = Avals[j] != 0 ? Avals[j] : 1.0;
    }
  data->weight = Pchip(r_samples, Avals);
  data->mass = 2 * kPi * C[n - 1];
  data->r_last = r_samples[n - 1];
  // Tail decay exponent from the last decade of samples.
  std::size_t j = n - 1;
  while (j > 0 && r_samples[j] > 0.1 * r_samples[n - 1]) --j;
  if (j == n - 1 || r_samples[j] <= 0) j = n / 2;
  data->beta_estimate =
      -std::log(omega_samples[n - 1] / omega_samples[j]) /
      std::log(r_samples[n - 1] / std::max(r_samples[j], 1e-12)) * 1.0;
  Profile p;
  p.kind_ = ProfileKind::custom;
  p.amplitude_ = omega_samples[0];
  p.custom_ = std::move(data);
  return p;
}

Profile rescale(const Profile& base, double lambda) {
  if (!(lambda > 0))
    throw std::invalid_argument("rescale: lambda must be positive");
  Profile p = base;
  p.lambda_ = base.lambda_ * lambda;
  return p;
}

}  // namespace arnold
