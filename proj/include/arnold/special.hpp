#pragma once

namespace arnold {

/// Exponential integral E1(x) for x > 0.
double expint_e1(double x);

/// Ei(x) for x > 0 (principal value), used by the entire completion of E_in.
double expint_ei(double x);

/// Entire function E_in(z) = INT_0^z (1 - e^{-t})/t dt, valid for all real z.
/// Satisfies E_in(z) = euler_gamma + log(z) + E1(z) for z > 0.
double e_in(double z);

/// Inverse of the strictly increasing map z -> E_in(z) on the real line.
double e_in_inverse(double y);

/// Digamma function psi(x) = d/dx log Gamma(x) for x > 0.
double digamma(double x);

}  // namespace arnold
