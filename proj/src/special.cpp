#include "arnold/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "arnold/numerics.hpp"

namespace arnold {

double expint_e1(double x) {
  if (!(x > 0)) throw std::invalid_argument("expint_e1: need x > 0");
  if (x <= 1.0) {
    // E1(x) = -gamma - log x + sum_{n>=1} (-1)^{n+1} x^n / (n n!)
    double sum = 0, term = 1;
    for (int n = 1; n <= 40; ++n) {
      term *= -x / n;
      const double add = -term / n;
      sum += add;
      if (std::abs(add) < 1e-18 * (std::abs(sum) + 1e-300)) break;
    }
    return -kEulerGamma - std::log(x) + sum;
  }
  if (x > 700.0) return 0.0;
  // Continued fraction (modified Lentz).
  double b = x + 1, c = 1e308, d = 1 / b, h = d;
  for (int i = 1; i <= 200; ++i) {
    const double a = -static_cast<double>(i) * i;
    b += 2;
    d = 1 / (a * d + b);
    c = b + a / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1) < 1e-16) break;
  }
  return h * std::exp(-x);
}

double expint_ei(double x) {
  if (!(x > 0)) throw std::invalid_argument("expint_ei: need x > 0");
  if (x > 700.0) return std::numeric_limits<double>::infinity();
  // Power series: Ei(x) = gamma + log x + sum_{n>=1} x^n / (n n!).
  // All terms positive, converges for the full double range used here.
  double sum = 0, term = 1;
  for (int n = 1; n <= 2000; ++n) {
    term *= x / n;
    const double add = term / n;
    sum += add;
    if (add < 1e-17 * sum) break;
  }
  return kEulerGamma + std::log(x) + sum;
}

double e_in(double z) {
  if (z == 0) return 0.0;
  if (z > 4.0) return kEulerGamma + std::log(z) + expint_e1(z);
  if (z < -4.0) return kEulerGamma + std::log(-z) - expint_ei(-z);
  // Entire series sum_{m>=1} (-1)^{m+1} z^m / (m m!).
  double sum = 0, term = 1;
  for (int m = 1; m <= 60; ++m) {
    term *= -z / m;
    const double add = -term / m;
    sum += add;
    if (std::abs(add) < 1e-18 * (std::abs(sum) + 1e-300)) break;
  }
  return sum;
}

double e_in_inverse(double y) {
  double lo = -1, hi = 1;
  for (int it = 0; it < 900 && e_in(lo) > y; ++it) lo *= 2;
  for (int it = 0; it < 900 && e_in(hi) < y && hi < 1e290; ++it) hi *= 2;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (e_in(mid) < y)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-15 * (std::abs(lo) + std::abs(hi) + 1)) break;
  }
  return 0.5 * (lo + hi);
}

double digamma(double x) {
  if (!(x > 0)) throw std::invalid_argument("digamma: requires x > 0");
  // Recurse upward until the asymptotic expansion converges, then use the
  // Bernoulli-number series log x - 1/(2x) - sum B_{2n} / (2n x^{2n}).
  double shift = 0;
  while (x < 10) {
    shift -= 1 / x;
    x += 1;
  }
  const double u = 1 / (x * x);
  const double tail =
      u * (1.0 / 12 -
           u * (1.0 / 120 - u * (1.0 / 252 - u * (1.0 / 240 - u / 132))));
  return shift + std::log(x) - 0.5 / x - tail;
}

}  // namespace arnold
