#pragma once

#include <span>
#include <vector>

#include "convec/ob_state.hpp"
#include "convec/symmetric_subspace.hpp"

namespace convec::energy {

using benard::OBState;
using spectral::SpectralField;
using spectral::VelocityField;
using subspace::SProfiles;

/// One diagnostic sample of a perturbation-energy balance.
struct EnergyRecord {
  double t = 0;
  double E = 0;
  double grad_u_sq = 0;
  double grad_sigma_sq = 0;
  double rhs = 0;       // dE/dt predicted by the energy identity
  double F_value = 0;   // stability functional, rhs = (F - 1) * dissipation
  double residual = 0;  // |finite-difference dE/dt - rhs|, filled in by energy_identity_residual
};

/// (1/Pr)||u||^2 + Ra ||sigma||^2 on the periodicity cell.
double energy_benard(const VelocityField& u, const SpectralField& sigma, double pr, double ra);
/// Same functional with u given by its stream function.
double energy_benard_stream(const SpectralField& psi, const SpectralField& sigma, double pr, double ra);

/// (1/(2 Pr))||u||^2 + (1/2)||sigma||^2 given the two squared norms.
double energy_annulus(double u_norm_sq, double sigma_norm_sq, double pr);

/// Diagnostics of the fluctuating part of a Boussinesq state. The balance
///   dE/dt = 2 [ 2 Ra <u^z, s> - Ra <u^z T', s> - (1/Pr) <u . grad A, u> - |grad u|^2 - Ra |grad s|^2 ]
/// with E = (1/Pr)|u|^2 + Ra|s|^2 holds exactly for the truncated dynamics;
/// F is the ratio of the production terms to the dissipation 2(|grad u|^2 + Ra |grad s|^2).
EnergyRecord benard_record(const OBState& state, double pr, double ra);

/// Centered finite-difference dE/dt at uniformly spaced samples (4th order
/// where five points are available, 2nd order next to the ends of short series;
/// endpoints are skipped). Returns |dE/dt - rhs| at interior samples, NaN at
/// skipped ones.
std::vector<double> identity_residuals(std::span<const double> t, std::span<const double> E,
                                       std::span<const double> rhs);

/// Fills `residual` in each record and returns the interior residuals.
std::vector<double> energy_identity_residual(std::vector<EnergyRecord>& records);
std::vector<EnergyRecord> energy_identity_residual(std::span<const OBState> trajectory, double pr, double ra);

struct AprioriReport {
  double grad_bound = 0;        // ||f'||_2
  double grad_sup = 0;          // sup_t ||A_z(., t)||_2
  double curvature_bound = 0;   // ||f''||_2
  double curvature_sup = 0;     // sup_t ||A_zz(., t)||_2
  double grad_margin() const { return grad_bound - grad_sup; }
  double curvature_margin() const { return curvature_bound - curvature_sup; }
  bool ok(double tol = 1e-10) const { return grad_margin() >= -tol && curvature_margin() >= -tol; }
};

/// Checks sup_t |A_z| <= |f'| and sup_t |A_zz| <= |f''| for the S-evolution of
/// the cosine data `a` (coefficients of f) at the given times.
AprioriReport check_apriori_bounds(const Eigen::VectorXd& f_cos_coeffs, double pr, std::span<const double> times);

}  // namespace convec::energy
