#pragma once

// The x-independent subspace S of the Boussinesq problem with stress-free walls:
// fields (G(z,t), A(z,t) e_1, T(z,t)). On S the transport terms vanish and the
// dynamics reduce to two decoupled heat equations with closed-form solutions.

#include <Eigen/Dense>

#include "convec/ob_state.hpp"

namespace convec::subspace {

using benard::OBState;

/// Mode vectors of the S-component at time t.
///   A(z) = sum_{n=0..N} a[n] cos(n pi z)
///   T(z) = sum_{n=1..N} b[n] sin(n pi z)      (b[0] is kept at 0)
///   G(z) = -Ra sum_{n>=1} b[n]/(n pi) cos(n pi z)    (gauge: zero mean)
struct SProfiles {
  Eigen::VectorXd a;
  Eigen::VectorXd b;
  double pr = 1.0;
  double ra = 0.0;
  double t = 0.0;

  static SProfiles zero(int n_max, double pr, double ra);

  int n_max() const { return static_cast<int>(a.size()) - 1; }
  double velocity(double z) const;
  double velocity_dz(double z) const;
  double temperature(double z) const;
  double temperature_dz(double z) const;
  double pressure(double z) const;
  double pressure_dzz(double z) const;
  /// cos(n pi z) coefficients of G.
  Eigen::VectorXd pressure_coeffs() const;
};

/// Complement of S: every field has zero x-average.
struct SubspaceSplit {
  SProfiles s_part;
  OBState f_part;
};

/// Closed-form evolution of S-data from their current time by dt.
/// A decays as exp(-Pr n^2 pi^2 dt), T as exp(-n^2 pi^2 dt); a[0] is conserved.
SProfiles evolve(const SProfiles& s, double dt);

/// Midpoint z-grid on which profile samples are given.
Eigen::VectorXd profile_grid(int nz);

/// Cosine and sine coefficients of sampled profiles (discrete transform on
/// profile_grid; exact for data band-limited below the grid size).
Eigen::VectorXd cosine_coefficients(const Eigen::VectorXd& samples, int n_max);
Eigen::VectorXd sine_coefficients(const Eigen::VectorXd& samples, int n_max);

/// Solution on S from initial v^x = f(z), v^z = 0, tau = g(z), at time t.
SProfiles evolve_S_analytic(const Eigen::VectorXd& f_samples, const Eigen::VectorXd& g_samples, double t, double pr,
                            double ra, int n_max);

SProfiles project_S(const OBState& state, double pr, double ra);
OBState project_F(const OBState& state);
SubspaceSplit split(const OBState& state, double pr, double ra);
/// Embed S-profiles into a state of the given horizontal truncation (a[0] must be 0).
OBState reconstruct(const SProfiles& s, int m_max);

/// x-averaged v^x and tau of the solution started from `initial`, evaluated at
/// time t through the S-dynamics alone.
SProfiles mean_values(const OBState& initial, double t, double pr, double ra);

/// Steady pipe flow v(r) = C (R^2 - r^2) / (4 mu).
double poiseuille_profile(double c, double mu, double radius, double r);
/// sup_{0<r<R} |v'(r)| = |C| R / (2 mu).
double poiseuille_gradient_bound(double c, double mu, double radius);

}  // namespace convec::subspace
