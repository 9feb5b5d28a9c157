#pragma once

#include <Eigen/Dense>
#include <vector>

#include "convec/polar_space.hpp"

namespace convec::annulus {

/// Nondimensional annulus: radii D/2 and 1 + D/2, B = log(Ro/Ri).
struct AnnulusParams {
  double pr = 1.0;
  double ra = 0.0;
  double d = 1.0;  // gap parameter 2 Ri / (Ro - Ri)
  double b = 0.0;
  double eps = 0.0;  // 1 / b
  double ri = 0.0;
  double ro = 0.0;

  void validate() const;
};

AnnulusParams geometry(double d, double pr = 1.0, double ra = 0.0);

/// Dimensional inputs in SI units.
struct PhysicalParams {
  double nu = 0;           // kinematic viscosity
  double diffusivity = 0;  // thermal diffusivity
  double alpha = 0;        // volume expansion coefficient
  double g = 0;
  double d_theta = 0;      // inner minus outer wall temperature
  double gap = 0;          // Ro - Ri
};

struct Dimensionless {
  double pr, ra;
};

Dimensionless nondimensionalize(const PhysicalParams& p);

/// Pure-conduction temperature between walls held at theta_i (r = Ri) and theta_o (r = Ro).
double conduction_lift(double r, double theta_i, double theta_o, double ri, double ro);

/// Galerkin residual of the steady equations, momentum rows first. The
/// discrete system is posed on any family of `space`.
Eigen::VectorXd steady_residual_vector(const PolarSpace& space, const AnnulusParams& p, const Eigen::VectorXd& a,
                                       const Eigen::VectorXd& c);
/// Max-norm of the residual relative to the max-norm of the buoyancy forcing.
double steady_residual(const PolarSpace& space, const AnnulusParams& p, const Eigen::VectorXd& a,
                       const Eigen::VectorXd& c);

/// Forcing (Ra/B) <sin(phi) e_r, w> on the stream basis.
Eigen::VectorXd buoyancy_forcing(const PolarSpace& space, const AnnulusParams& p);

struct SteadyOptions {
  double tol = 1e-10;
  int max_iters = 200;
};

/// Even-symmetric steady state: coefficients in the Even family of the given resolution.
struct BaseState {
  AnnulusParams params;
  Resolution res;
  Eigen::VectorXd stream;
  Eigen::VectorXd temperature;
  double residual = 0;
  int picard_iters = 0;
  double grad_v_norm = 0;    // ||grad v0||_2
  double grad_tau_norm = 0;  // ||grad tau0||_2
  std::vector<double> history;

  PolarSpace space() const { return PolarSpace(params.ri, res, Family::Even); }
  PolarField field(int n_nodes) const;
};

/// Picard iteration with frozen transport inside the even-symmetric subspace.
/// Throws DivergenceError when the tolerance is not met within max_iters.
BaseState steady_solve(const AnnulusParams& p, Resolution res, SteadyOptions opt = {});

/// Zero base state (conduction) at the given resolution.
BaseState conduction_state(const AnnulusParams& p, Resolution res);

}  // namespace convec::annulus
