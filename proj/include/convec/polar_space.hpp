#pragma once

// Galerkin discretization of fields on the annulus Ri < r < Ro = Ri + 1:
// Fourier modes in the polar angle times Legendre-based radial bases that
// satisfy the wall conditions exactly. Velocities are curls of a stream
// function, so every velocity in the space is divergence-free.

#include <Eigen/Dense>
#include <vector>

#include "convec/errors.hpp"

namespace convec::annulus {

/// Which reflection class of the angle phi -> pi - phi a space spans.
/// Even: v^r, tau even and v^phi odd. Odd: the complement. Full: both.
enum class Family { Even, Odd, Full };

struct Resolution {
  int k_max = 8;    // largest Fourier wavenumber
  int n_r = 24;     // radial basis functions per Fourier component
  int nq_r = 0;     // radial quadrature nodes (0: automatic)
  int n_phi = 0;    // angular quadrature nodes (0: automatic)

  void validate() const;
  int radial_nodes() const { return nq_r > 0 ? nq_r : 2 * n_r + 16; }
  int angular_nodes() const { return n_phi > 0 ? n_phi : 4 * k_max + 8; }
};

/// One Fourier-radial basis element: radial index j in a cos (parity +1) or
/// sin (parity -1) component of wavenumber k.
struct Mode {
  int k;
  int parity;
  int j;
};

/// Legendre polynomials and derivatives at s, degrees 0..n.
struct LegendreTable {
  Eigen::VectorXd p, d1, d2;
};
LegendreTable legendre(int n, double s);

/// Radial bases on s in [-1, 1], scaled to O(1) stiffness. Returns value and
/// first two s-derivatives.
struct RadialJet {
  double f = 0, d1 = 0, d2 = 0;
};
/// Vanishes at both ends: (L_j - L_{j+2}) / sqrt(4j + 6).
RadialJet dirichlet_function(const LegendreTable& t, int j);
/// Vanishes with its derivative at both ends.
RadialJet clamped_function(const LegendreTable& t, int j);

/// Gauss-Legendre nodes and weights on (a, b).
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int n, double a, double b);

/// Velocity of one basis element (or of a combination) at a point, with
/// Cartesian components and their physical-space gradients.
struct VelocityJet {
  double vr = 0, vphi = 0;
  double ux = 0, uz = 0;
  double dux_dr = 0, dux_dphi = 0;  // dphi entries carry the 1/r factor
  double duz_dr = 0, duz_dphi = 0;
  double dvr_dr = 0, dvphi_dphi = 0;  // for the polar divergence
};

struct ScalarJet {
  double f = 0, dr = 0, dphi = 0;  // dphi carries the 1/r factor
};

/// Basis plus tensor quadrature. The quadrature does not depend on the family,
/// so spaces with equal geometry and resolution share their nodes. Without
/// tables only the mode bookkeeping and pointwise evaluation are available.
class PolarSpace {
 public:
  PolarSpace(double r_inner, Resolution res, Family family, bool with_tables = true);

  double r_inner() const { return ri_; }
  double r_outer() const { return ri_ + 1.0; }
  const Resolution& resolution() const { return res_; }
  Family family() const { return family_; }

  const std::vector<Mode>& stream_modes() const { return stream_modes_; }
  const std::vector<Mode>& scalar_modes() const { return scalar_modes_; }
  int n_stream() const { return static_cast<int>(stream_modes_.size()); }
  int n_scalar() const { return static_cast<int>(scalar_modes_.size()); }

  VelocityJet stream_basis(int i, double r, double phi) const;
  ScalarJet scalar_basis(int i, double r, double phi) const;
  VelocityJet velocity(const Eigen::VectorXd& a, double r, double phi) const;
  ScalarJet scalar(const Eigen::VectorXd& c, double r, double phi) const;

  // Quadrature nodes (flattened, radial index fastest) and weights including r.
  const Eigen::VectorXd& qr() const { return qr_; }
  const Eigen::VectorXd& qphi() const { return qphi_; }
  const Eigen::VectorXd& qw() const { return qw_; }
  int n_quad() const { return static_cast<int>(qw_.size()); }

  /// Basis values at the quadrature nodes (n_quad x n_stream or n_scalar).
  struct VelocityTables {
    Eigen::MatrixXd vr, vphi, ux, uz, dux_dr, dux_dphi, duz_dr, duz_dphi;
  };
  struct ScalarTables {
    Eigen::MatrixXd f, dr, dphi;
  };
  const VelocityTables& vt() const { return vt_; }
  const ScalarTables& st() const { return st_; }

  /// <grad u, grad w> and <grad s, grad t> (Cartesian components for vectors).
  const Eigen::MatrixXd& velocity_stiffness() const { return gu_; }
  const Eigen::MatrixXd& scalar_stiffness() const { return gt_; }
  const Eigen::MatrixXd& velocity_mass() const { return mu_; }
  const Eigen::MatrixXd& scalar_mass() const { return mt_; }

 private:
  double ri_;
  Resolution res_;
  Family family_;
  std::vector<Mode> stream_modes_, scalar_modes_;
  Eigen::VectorXd qr_, qphi_, qw_;
  VelocityTables vt_;
  ScalarTables st_;
  Eigen::MatrixXd gu_, gt_, mu_, mt_;
};

/// Index of `m` among `modes`, or -1.
int find_mode(const std::vector<Mode>& modes, const Mode& m);

/// Coefficients of a state of `from` re-expressed in `to` (modes absent from
/// `to` must carry zero coefficients, otherwise InvalidArgument).
Eigen::VectorXd embed_stream(const PolarSpace& from, const PolarSpace& to, const Eigen::VectorXd& a);
Eigen::VectorXd embed_scalar(const PolarSpace& from, const PolarSpace& to, const Eigen::VectorXd& c);

/// Image under phi -> pi - phi with v^r, tau even and v^phi odd. Acts on
/// coefficients of any family (the even family is fixed pointwise).
Eigen::VectorXd reflect_stream(const PolarSpace& space, const Eigen::VectorXd& a);
Eigen::VectorXd reflect_scalar(const PolarSpace& space, const Eigen::VectorXd& c);

/// Fourier-in-phi times nodal-in-r representation of (v^r, v^phi, tau).
/// Row k of each matrix holds the radial values of the cos(k phi) or
/// sin(k phi) component.
struct PolarField {
  Eigen::VectorXd r;
  Eigen::MatrixXd vr_cos, vr_sin, vphi_cos, vphi_sin, tau_cos, tau_sin;

  static PolarField zero(int k_max, const Eigen::VectorXd& r_nodes);
  int k_max() const { return static_cast<int>(vr_cos.rows()) - 1; }
  int n_nodes() const { return static_cast<int>(r.size()); }
  /// Values of (v^r, v^phi, tau) at radial node i and angle phi.
  Eigen::Vector3d at(int i, double phi) const;
};

/// Chebyshev-Lobatto nodes on [Ri, Ro], both walls included.
Eigen::VectorXd lobatto_nodes(double r_inner, int n);

/// Samples a (velocity, temperature) state of `space` on the given nodes.
PolarField to_polar_field(const PolarSpace& space, const Eigen::VectorXd& a, const Eigen::VectorXd& c,
                          const Eigen::VectorXd& r_nodes);

/// max over the nodes and an angular grid of
/// |v^r(phi) - v^r(pi-phi)| + |v^phi(phi) + v^phi(pi-phi)| + |tau(phi) - tau(pi-phi)|.
double symmetry_residual(const PolarField& f, int n_phi = 0);
/// Same with the reflected signs flipped (zero for odd fields).
double antisymmetry_residual(const PolarField& f, int n_phi = 0);
/// Average of the field and its reflected image.
PolarField symmetrize(const PolarField& f);

/// Cartesian vertical velocity u^z = v^r sin(phi) + v^phi cos(phi) on the
/// nodes x angles grid (phi measured from the horizontal).
Eigen::MatrixXd vertical_components(const PolarField& f, const Eigen::VectorXd& phis);

}  // namespace convec::annulus
