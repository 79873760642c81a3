#pragma once

#include <cstdint>
#include <string>

#include "arnold/grid.hpp"
#include "arnold/profiles.hpp"

namespace arnold {

/// Values of the stability forms on one field.
struct FormValues {
  double J = 0;             ///< second-variation form
  double Q = 0;             ///< diffusive form
  double N = 0;             ///< cubic term
  double gamma = 0;         ///< coercivity constant for J
  double delta = 0;         ///< coercivity constant for Q
  double x_norm_sq = 0;     ///< INT A omega^2 dx
  double grad_norm_sq = 0;  ///< INT A |grad omega|^2 dx

  std::string to_json() const;
};

/// J(omega) = (1/2) sum_k 2 pi INT A |omega_k|^2 r dr - E(omega), with the
/// interaction energy evaluated per mode (k = 0 through the radial log
/// kernel, k != 0 through B_k).
double j_form(const PolarField& field, const Profile& profile);

/// Q(omega) = sum_k 2 pi INT {A(|omega_k'|^2 + k^2 |omega_k|^2 / r^2)
///                            - B |omega_k|^2} r dr.
double q_form(const PolarField& field,
              const Profile& profile = gaussian_profile());

/// Cubic term N(omega) = (1/2) INT {A, psi} omega^2 dx with psi the stream
/// function of omega; the Poisson bracket is assembled in mode space and
/// multiplied out on a dealiased collocation circle.
double n_form(const PolarField& field,
              const Profile& profile = gaussian_profile());

struct GammaEstimate {
  double gamma = 0;
  double c1_prime = 0;
  double hardy = 0;
  bool radial_sector_coercive = false;  ///< false when C_H >= 1
};

/// gamma = min(1/2, 1 - C1', 1 - C_H); when C_H >= 1 the estimate applies
/// only outside the radial sector and is flagged accordingly.
GammaEstimate gamma_estimate(const Profile& profile, const RadialGrid& grid);

struct DeltaEstimate {
  double delta = 0;       ///< min over the angular sectors below
  double delta0 = 0;      ///< k = 0, mass constraint
  double delta1 = 0;      ///< |k| = 1, first-moment constraint
  double delta2 = 0;      ///< |k| = 2, unconstrained lowest eigenvalue
  double delta_high = 0;  ///< |k| >= 3 comparison bound (= 1/2)
  double overlap0 = 0;    ///< |<constraint dir, ground state>| in sector 0
  double overlap1 = 0;    ///< same in sector 1
};

/// Coercivity constant of the diffusive form on the constrained space
/// (zero mass and first moments), gaussian weights: sectors k = 0 and 1
/// combine the two lowest L_k eigenvalues with the alignment of the
/// constraint direction against the ground state through coercivity_bound;
/// k = 2 uses the lowest eigenvalue; |k| >= 3 sectors are bounded below
/// by 1/2 via the harmonic comparison L_k >= |k|/2 - 1.
DeltaEstimate delta_estimate(const RadialGrid& grid);

/// All form values plus the coercivity constants in one record.
FormValues form_values(const PolarField& field, const Profile& profile,
                       double gamma, double delta);

/// Seeded band-limited random field: modes |k| <= k_band with radial
/// band-limited noise under a gaussian envelope, zero-padded to the grid.
PolarField random_field(const RadialGrid& grid, std::uint64_t seed,
                        int k_band = 8, int radial_waves = 12);

}  // namespace arnold
