#pragma once

#include <map>
#include <set>
#include <string>

#include "arnold/numerics.hpp"
#include "arnold/profiles.hpp"

namespace arnold {

enum class Mapping { uniform_r, log_r, uniform_s };

std::string to_string(Mapping m);
Mapping mapping_from_string(const std::string& s);

/// Radial collocation grid with quadrature weights for integrals against
/// the planar radial measure r dr, truncated at r_max.
struct RadialGrid {
  Vec r;            ///< strictly increasing nodes, r[0] >= 0
  Vec w;            ///< weights: sum f(r_i) w_i ~ INT_0^rmax f(r) r dr
  double r_max = 0.0;
  double r_min = 0.0;  ///< inner radius (log_r mapping only, else r[0])
  Mapping mapping = Mapping::uniform_r;

  std::size_t size() const { return r.size(); }
  /// sum f_i w_i for a sampled integrand (against r dr).
  double integrate(const Vec& f) const;
  Cplx integrate(const CVec& f) const;
};

/// Builds a grid with composite Simpson weights on the mapped coordinate.
/// uniform_r: nodes i*h on [0, r_max]; log_r: nodes geometric on
/// [r_min, r_max]; uniform_s: nodes even in s = r^2/4 on [0, r_max^2/4].
/// r_min <= 0 selects the default inner radius for log_r.
RadialGrid make_grid(std::size_t N, double r_max, Mapping mapping,
                     double r_min = 0.0);

/// Field on a radial grid expanded in angular Fourier modes
/// omega(r, theta) = sum_k omega_k(r) e^{i k theta}.
struct PolarField {
  RadialGrid grid;
  std::map<int, CVec> modes;
  bool reality = true;  ///< enforce omega_{-k} = conj(omega_k)

  PolarField() = default;
  explicit PolarField(RadialGrid g) : grid(std::move(g)) {}

  /// Mode accessor; with the reality flag set, a missing k is resolved
  /// through the conjugate of -k. Absent modes are zero.
  CVec mode(int k) const;
  /// Stores a mode; under the reality flag the conjugate partner is
  /// stored as well so iteration over `modes` sees both signs.
  void set_mode(int k, CVec values);
  int max_mode() const;

  double x_norm_sq(const Profile& profile) const;
  double grad_norm_sq(const Profile& profile) const;
};

/// (M0, M1, M2, I): mass, first moments, second moment; only the k = 0
/// and |k| = 1 modes contribute.
struct Moments {
  double M0 = 0, M1 = 0, M2 = 0, I = 0;
};
Moments moments(const PolarField& field);

enum class Constraint { mass, angular_first, linear_first };

/// Orthogonal projection (in the A-weighted inner product) onto the
/// subspace where the selected moment functionals vanish. linear_first
/// requires the profile weight to grow faster than r^4 (beta > 4).
PolarField project_constraints(const PolarField& field,
                               const std::set<Constraint>& which,
                               const Profile& profile);

/// CSV serialization with columns (k, r, re, im), 12 significant digits.
std::string field_to_csv(const PolarField& field);

}  // namespace arnold
