#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "convec/annulus_basestate.hpp"

namespace convec::stability {

using annulus::AnnulusParams;
using annulus::BaseState;
using annulus::Family;
using annulus::PolarSpace;
using annulus::Resolution;

enum class SymmetryLabel { Even, Odd, Mixed };
std::string to_string(SymmetryLabel s);

/// Quadratic forms of the perturbation energy balance about a base state,
/// on one reflection family. State vector x = [stream coefficients; temperature
/// coefficients].
///   dissipation  D(x) = x' G x = |grad u|^2 + |grad sigma|^2
///   production   I(x) = x' N x = sqrt(Ra) <u^z + u^r/(rB) - u.grad tau0, sigma> - (1/Pr) <u.grad v0, u>
class StabilityProblem {
 public:
  StabilityProblem(const BaseState& base, Family family);

  const PolarSpace& space() const { return space_; }
  const AnnulusParams& params() const { return params_; }
  Family family() const { return space_.family(); }
  int size() const { return static_cast<int>(g_.rows()); }
  int n_stream() const { return space_.n_stream(); }

  const Eigen::MatrixXd& dissipation() const { return g_; }
  const Eigen::MatrixXd& production() const { return n_; }

  /// Linearized perturbation dynamics  mass * x' = linear * x, with
  /// energy (1/2Pr)|u|^2 + (1/2)|sigma|^2 = x' mass x / 2.
  const Eigen::MatrixXd& mass() const { return m_; }
  const Eigen::MatrixXd& linear() const { return l_; }

  /// Pencil with the diffusion and symmetric strain forms on the left and the
  /// unscaled coupling on the right: (G + S/Pr) x = lambda C x.
  const Eigen::MatrixXd& coupling_lhs() const { return pa_; }
  const Eigen::MatrixXd& coupling_rhs() const { return pb_; }

  double production_value(const Eigen::VectorXd& x) const;
  double dissipation_value(const Eigen::VectorXd& x) const;
  /// Stability functional I(x) / D(x); rejects the zero pair.
  double functional(const Eigen::VectorXd& x) const;
  /// dE/dt from the linearized dynamics.
  double energy_rate(const Eigen::VectorXd& x) const;

 private:
  AnnulusParams params_;
  PolarSpace space_;
  Eigen::MatrixXd g_, n_, m_, l_, pa_, pb_;
};

struct EigenSolution {
  std::vector<double> lambdas;              // positive eigenvalues, ascending
  std::vector<Eigen::VectorXd> vectors;     // G-normalized, Full-family coordinates
  std::vector<SymmetryLabel> labels;
  double lambda_c = 0;                      // least positive eigenvalue (inf if none)
  std::vector<double> production_ratios;    // all generalized eigenvalues mu of N x = mu G x
};

/// Euler-Lagrange pencil G x = lambda (N/2) x, so that the maximum of the
/// functional is 2 / lambda_c. The even and odd families decouple for a
/// symmetric base state and are solved separately when `split` is set.
EigenSolution solve_eig(const BaseState& base, int count, bool split = true);

/// Label of a Full-family state by the reflection residuals of its sampled field.
SymmetryLabel classify(const PolarSpace& full, const Eigen::VectorXd& x, double tol = 1e-8);

struct MaximizerResult {
  double value = 0;  // max of x'Nx / x'Gx
  Eigen::VectorXd x; // G-normalized
  int iterations = 0;
  double residual = 0;
};

/// Direct maximization of the Rayleigh quotient by block locally optimal
/// conjugate-gradient iteration in G-whitened coordinates.
MaximizerResult maximize_quotient(const Eigen::MatrixXd& n, const Eigen::MatrixXd& g, int block = 4,
                                  double tol = 1e-11, int max_iters = 5000);

/// Scaled residual |A x - lambda B x| / (|A x| + |lambda| |B x|).
double pencil_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::VectorXd& x, double lambda);

struct StabilityReport {
  double M = 0;            // maximum of the functional (direct route)
  double M_eig = 0;        // 2 / lambda_c
  double lambda_c = 0;
  double lambda_coupling = 0; // least positive eigenvalue of the unscaled coupling pencil
  bool energy_stable = true;
  Eigen::VectorXd most_dangerous;  // Full-family coordinates, x'Gx = 1
  SymmetryLabel label = SymmetryLabel::Mixed;
  double normalization = 0;  // x'Gx of the reported maximizer
  double el_residual = 0;    // plug-in residual in G x = lambda_c (N/2) x
  int iterations = 0;
  std::vector<double> lambdas;
  std::vector<SymmetryLabel> labels;

  std::string verdict() const { return energy_stable ? "energy-stable" : "symmetry-breaking-possible"; }
};

/// Computes M both ways and throws NormalizationMismatch when they disagree
/// beyond rel_tol.
StabilityReport maximize_F(const BaseState& base, int count = 6, double rel_tol = 1e-3);

struct SlopeReport {
  double slope = 0;     // dE/dt at t = 0 from a short linearized integration
  double identity = 0;  // (F - 1) D evaluated directly
  double functional = 0;
};

/// Integrates mass x' = linear x with Crank-Nicolson over a few small steps
/// from x0 and extrapolates the initial energy slope.
SlopeReport energy_slope(const StabilityProblem& prob, const Eigen::VectorXd& x0, double dt = 1e-5);

/// Slope for the maximizer; requires M > 1 and checks that the energy grows.
SlopeReport most_dangerous_experiment(const StabilityProblem& full, const StabilityReport& report);

// Planar-layer limit problem on 0 < z < 1 with no-slip, zero-temperature
// walls and horizontal wavenumber a: G x = lambda C x with C the unscaled
// coupling <u_z, sigma>.
struct LayerSolution {
  double lambda_c = 0;
  double wavenumber = 0;
  int n_r = 0;
  Eigen::VectorXd spectrum;  // all eigenvalues, ascending (+-inf where C is singular)
  Eigen::VectorXd stream, temperature;
  SymmetryLabel label = SymmetryLabel::Mixed;  // parity about z = 1/2
};

/// Dissipation g and symmetric coupling c (x'cx = 2 a <psi, theta>) of the layer pencil.
struct LayerPencil {
  Eigen::MatrixXd g, c;
};
LayerPencil layer_pencil(int n_r, double wavenumber);

LayerSolution solve_eig0_at(int n_r, double wavenumber);
/// Minimizes lambda_c over [a_min, a_max] on a grid plus golden-section refinement.
LayerSolution solve_eig0(int n_r, double a_min, double a_max, int grid = 24);

}  // namespace convec::stability
