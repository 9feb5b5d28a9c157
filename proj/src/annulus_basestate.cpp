#include "convec/annulus_basestate.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace convec::annulus {

void AnnulusParams::validate() const {
  if (!(pr > 0)) throw InvalidArgument("Pr must be positive");
  if (!(ra >= 0) || !std::isfinite(ra)) throw InvalidArgument("Ra must be finite and non-negative");
  if (!(d > 0)) throw InvalidArgument("gap parameter D must be positive");
  if (!(b > 0) || std::abs(ro - ri - 1.0) > 1e-12) throw InvalidArgument("inconsistent annulus geometry");
}

AnnulusParams geometry(double d, double pr, double ra) {
  if (!(d > 0) || !std::isfinite(d)) throw InvalidArgument("gap parameter D must be positive");
  AnnulusParams p;
  p.pr = pr;
  p.ra = ra;
  p.d = d;
  p.b = std::log1p(2.0 / d);
  p.eps = 1.0 / p.b;
  p.ri = 0.5 * d;
  p.ro = 1.0 + 0.5 * d;
  p.validate();
  return p;
}

Dimensionless nondimensionalize(const PhysicalParams& p) {
  if (!(p.nu > 0)) throw InvalidArgument("viscosity must be positive");
  if (!(p.diffusivity > 0)) throw InvalidArgument("thermal diffusivity must be positive");
  if (!(p.alpha > 0) || !(p.g > 0) || !(p.gap > 0)) throw InvalidArgument("alpha, g and gap must be positive");
  return {p.nu / p.diffusivity, p.alpha * p.g * p.d_theta * std::pow(p.gap, 3) / (p.nu * p.diffusivity)};
}

double conduction_lift(double r, double theta_i, double theta_o, double ri, double ro) {
  if (!(ri > 0) || !(ro > ri)) throw InvalidArgument("need 0 < Ri < Ro");
  if (r < ri || r > ro) throw InvalidArgument("r outside the annulus");
  return theta_i + (theta_o - theta_i) * (std::log(r) - std::log(ri)) / std::log(ro / ri);
}

namespace {

// Fields of a state at the quadrature nodes.
struct NodalState {
  Eigen::VectorXd vr, vphi, ux, uz, dux_dr, dux_dphi, duz_dr, duz_dphi;
  Eigen::VectorXd t, t_dr, t_dphi;
};

NodalState nodal(const PolarSpace& s, const Eigen::VectorXd& a, const Eigen::VectorXd& c) {
  if (a.size() != s.n_stream() || c.size() != s.n_scalar())
    throw InvalidArgument("coefficient vectors do not match the space");
  const auto& v = s.vt();
  const auto& t = s.st();
  return {v.vr * a,     v.vphi * a,   v.ux * a,     v.uz * a, v.dux_dr * a, v.dux_dphi * a, v.duz_dr * a,
          v.duz_dphi * a, t.f * c, t.dr * c, t.dphi * c};
}

void require_space(const PolarSpace& s, const AnnulusParams& p) {
  p.validate();
  if (std::abs(s.r_inner() - p.ri) > 1e-14) throw InvalidArgument("space and parameters describe different annuli");
}

// Coupling blocks shared by the residual and the Picard matrix.
struct LinearBlocks {
  Eigen::MatrixXd gu, gt, buoy, source;
  Eigen::VectorXd forcing;
};

LinearBlocks linear_blocks(const PolarSpace& s, const AnnulusParams& p) {
  const auto W = s.qw().asDiagonal();
  LinearBlocks L;
  L.gu = s.velocity_stiffness();
  L.gt = s.scalar_stiffness();
  // Ra <tau e3, w> and <v^r / (r B), theta>
  L.buoy = p.ra * (s.vt().uz.transpose() * W * s.st().f);
  const Eigen::VectorXd inv_rb = (s.qr().array() * p.b).inverse();
  L.source = s.st().f.transpose() * W * (inv_rb.asDiagonal() * s.vt().vr);
  L.forcing = buoyancy_forcing(s, p);
  return L;
}

}  // namespace

Eigen::VectorXd buoyancy_forcing(const PolarSpace& s, const AnnulusParams& p) {
  const Eigen::VectorXd sin_phi = s.qphi().array().sin();
  return (p.ra / p.b) * (s.vt().vr.transpose() * (s.qw().asDiagonal() * sin_phi));
}

Eigen::VectorXd steady_residual_vector(const PolarSpace& s, const AnnulusParams& p, const Eigen::VectorXd& a,
                                       const Eigen::VectorXd& c) {
  require_space(s, p);
  const auto n = nodal(s, a, c);
  const auto W = s.qw().asDiagonal();
  const auto& v = s.vt();
  const auto& t = s.st();
  // (v . grad) of the Cartesian components and of tau at the nodes
  const Eigen::VectorXd adv_x = n.vr.cwiseProduct(n.dux_dr) + n.vphi.cwiseProduct(n.dux_dphi);
  const Eigen::VectorXd adv_z = n.vr.cwiseProduct(n.duz_dr) + n.vphi.cwiseProduct(n.duz_dphi);
  const Eigen::VectorXd adv_t = n.vr.cwiseProduct(n.t_dr) + n.vphi.cwiseProduct(n.t_dphi);
  const Eigen::VectorXd sin_phi = s.qphi().array().sin();
  const Eigen::VectorXd inv_rb = (s.qr().array() * p.b).inverse();

  Eigen::VectorXd r(s.n_stream() + s.n_scalar());
  r.head(s.n_stream()) = (v.ux.transpose() * (W * adv_x) + v.uz.transpose() * (W * adv_z)) / p.pr +
                         s.velocity_stiffness() * a - p.ra * (v.uz.transpose() * (W * n.t)) -
                         (p.ra / p.b) * (v.vr.transpose() * (W * sin_phi));
  r.tail(s.n_scalar()) = t.f.transpose() * (W * adv_t) + s.scalar_stiffness() * c -
                         t.f.transpose() * (W * n.vr.cwiseProduct(inv_rb));
  return r;
}

double steady_residual(const PolarSpace& s, const AnnulusParams& p, const Eigen::VectorXd& a,
                       const Eigen::VectorXd& c) {
  const double scale = buoyancy_forcing(s, p).cwiseAbs().maxCoeff();
  const double r = steady_residual_vector(s, p, a, c).cwiseAbs().maxCoeff();
  return scale > 0 ? r / scale : r;
}

PolarField BaseState::field(int n_nodes) const {
  const auto s = space();
  return to_polar_field(s, stream, temperature, lobatto_nodes(params.ri, n_nodes));
}

BaseState conduction_state(const AnnulusParams& p, Resolution res) {
  p.validate();
  const PolarSpace s(p.ri, res, Family::Even);
  BaseState out;
  out.params = p;
  out.res = res;
  out.stream = Eigen::VectorXd::Zero(s.n_stream());
  out.temperature = Eigen::VectorXd::Zero(s.n_scalar());
  return out;
}

BaseState steady_solve(const AnnulusParams& p, Resolution res, SteadyOptions opt) {
  p.validate();
  if (!(opt.tol > 0) || opt.max_iters < 1) throw InvalidArgument("invalid solver options");
  const PolarSpace s(p.ri, res, Family::Even);
  const int nu = s.n_stream(), nt = s.n_scalar();
  const auto L = linear_blocks(s, p);
  const auto W = s.qw().asDiagonal();
  const auto& v = s.vt();
  const auto& t = s.st();

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nu + nt);
  rhs.head(nu) = L.forcing;

  // Oseen operator with the transport velocity frozen at x.
  auto picard_step = [&](const Eigen::VectorXd& x) {
    const auto n = nodal(s, x.head(nu), x.tail(nt));
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nu + nt, nu + nt);
    const Eigen::MatrixXd adv_x = n.vr.asDiagonal() * v.dux_dr + n.vphi.asDiagonal() * v.dux_dphi;
    const Eigen::MatrixXd adv_z = n.vr.asDiagonal() * v.duz_dr + n.vphi.asDiagonal() * v.duz_dphi;
    const Eigen::MatrixXd adv_t = n.vr.asDiagonal() * t.dr + n.vphi.asDiagonal() * t.dphi;
    A.topLeftCorner(nu, nu) = L.gu + (v.ux.transpose() * W * adv_x + v.uz.transpose() * W * adv_z) / p.pr;
    A.topRightCorner(nu, nt) = -L.buoy;
    A.bottomLeftCorner(nt, nu) = -L.source;
    A.bottomRightCorner(nt, nt) = L.gt + t.f.transpose() * W * adv_t;
    return Eigen::VectorXd(A.partialPivLu().solve(rhs));
  };
  auto residual = [&](const Eigen::VectorXd& x) { return steady_residual(s, p, x.head(nu), x.tail(nt)); };

  BaseState out;
  out.params = p;
  out.res = res;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(nu + nt);
  double res_now = residual(x);
  out.history.push_back(res_now);
  int it = 0;
  while (res_now >= opt.tol && it < opt.max_iters) {
    ++it;
    const Eigen::VectorXd target = picard_step(x);
    double omega = 1.0;
    Eigen::VectorXd next = target;
    double res_next = residual(next);
    for (int halvings = 0; res_next > res_now && halvings < 8; ++halvings) {
      omega *= 0.5;
      next = x + omega * (target - x);
      res_next = residual(next);
    }
    if (!next.allFinite()) throw DivergenceError("Picard iteration produced non-finite values");
    x = next;
    res_now = res_next;
    out.history.push_back(res_now);
  }
  if (res_now >= opt.tol)
  {
    char msg[160];
    std::snprintf(msg, sizeof msg, "Picard iteration did not reach %.3g within %d iterations (residual %.3g)", opt.tol,
                  opt.max_iters, res_now);
    throw DivergenceError(msg);
  }
  out.stream = x.head(nu);
  out.temperature = x.tail(nt);
  out.residual = res_now;
  out.picard_iters = it;
  out.grad_v_norm = std::sqrt(std::max(0.0, out.stream.dot(L.gu * out.stream)));
  out.grad_tau_norm = std::sqrt(std::max(0.0, out.temperature.dot(L.gt * out.temperature)));
  return out;
}

}  // namespace convec::annulus
