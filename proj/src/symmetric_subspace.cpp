#include "convec/symmetric_subspace.hpp"

#include <cmath>
#include <numbers>

namespace convec::subspace {

namespace {

constexpr double kPi = std::numbers::pi;

void require_finite(const Eigen::VectorXd& v, const char* what) {
  if (!v.allFinite()) throw InvalidArgument(std::string(what) + " contains non-finite samples");
}

}  // namespace

SProfiles SProfiles::zero(int n_max, double pr, double ra) {
  if (n_max < 0) throw InvalidArgument("n_max must be non-negative");
  return {Eigen::VectorXd::Zero(n_max + 1), Eigen::VectorXd::Zero(n_max + 1), pr, ra, 0.0};
}

double SProfiles::velocity(double z) const {
  double s = 0;
  for (int n = 0; n < a.size(); ++n) s += a[n] * std::cos(n * kPi * z);
  return s;
}

double SProfiles::velocity_dz(double z) const {
  double s = 0;
  for (int n = 1; n < a.size(); ++n) s -= a[n] * n * kPi * std::sin(n * kPi * z);
  return s;
}

double SProfiles::temperature(double z) const {
  double s = 0;
  for (int n = 1; n < b.size(); ++n) s += b[n] * std::sin(n * kPi * z);
  return s;
}

double SProfiles::temperature_dz(double z) const {
  double s = 0;
  for (int n = 1; n < b.size(); ++n) s += b[n] * n * kPi * std::cos(n * kPi * z);
  return s;
}

Eigen::VectorXd SProfiles::pressure_coeffs() const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(b.size());
  for (int n = 1; n < b.size(); ++n) g[n] = -ra * b[n] / (n * kPi);
  return g;
}

double SProfiles::pressure(double z) const {
  const Eigen::VectorXd g = pressure_coeffs();
  double s = 0;
  for (int n = 1; n < g.size(); ++n) s += g[n] * std::cos(n * kPi * z);
  return s;
}

double SProfiles::pressure_dzz(double z) const {
  const Eigen::VectorXd g = pressure_coeffs();
  double s = 0;
  for (int n = 1; n < g.size(); ++n) s -= g[n] * n * n * kPi * kPi * std::cos(n * kPi * z);
  return s;
}

SProfiles evolve(const SProfiles& s, double dt) {
  if (!(dt >= 0)) throw InvalidArgument("evolution time must be non-negative");
  SProfiles out = s;
  for (int n = 1; n < s.a.size(); ++n) {
    const double k2 = n * n * kPi * kPi;
    out.a[n] *= std::exp(-s.pr * k2 * dt);
    out.b[n] *= std::exp(-k2 * dt);
  }
  out.t = s.t + dt;
  return out;
}

Eigen::VectorXd profile_grid(int nz) {
  Eigen::VectorXd z(nz);
  for (int j = 0; j < nz; ++j) z[j] = (j + 0.5) / nz;
  return z;
}

Eigen::VectorXd cosine_coefficients(const Eigen::VectorXd& samples, int n_max) {
  const int nz = static_cast<int>(samples.size());
  if (nz < n_max + 1) throw ResolutionError("too few profile samples for the truncation");
  const Eigen::VectorXd z = profile_grid(nz);
  Eigen::VectorXd c(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    double s = 0;
    for (int j = 0; j < nz; ++j) s += samples[j] * std::cos(n * kPi * z[j]);
    c[n] = (n == 0 ? 1.0 : 2.0) * s / nz;
  }
  return c;
}

Eigen::VectorXd sine_coefficients(const Eigen::VectorXd& samples, int n_max) {
  const int nz = static_cast<int>(samples.size());
  if (nz < n_max + 1) throw ResolutionError("too few profile samples for the truncation");
  const Eigen::VectorXd z = profile_grid(nz);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n_max + 1);
  for (int n = 1; n <= n_max; ++n) {
    double s = 0;
    for (int j = 0; j < nz; ++j) s += samples[j] * std::sin(n * kPi * z[j]);
    c[n] = 2.0 * s / nz;
  }
  return c;
}

SProfiles evolve_S_analytic(const Eigen::VectorXd& f_samples, const Eigen::VectorXd& g_samples, double t, double pr,
                            double ra, int n_max) {
  require_finite(f_samples, "f");
  require_finite(g_samples, "g");
  if (!(pr > 0)) throw InvalidArgument("Pr must be positive");
  SProfiles s{cosine_coefficients(f_samples, n_max), sine_coefficients(g_samples, n_max), pr, ra, 0.0};
  return evolve(s, t);
}

SProfiles project_S(const OBState& state, double pr, double ra) {
  const int n_max = state.n_max();
  SProfiles s = SProfiles::zero(n_max, pr, ra);
  // v^x = -Phi_z: the m = 0 stream modes phi_n sin(n pi z) give -n pi phi_n cos(n pi z).
  for (int n = 1; n <= n_max; ++n) {
    s.a[n] = -n * kPi * state.phi.cos_part()(0, n);
    s.b[n] = state.tau.cos_part()(0, n);
  }
  s.t = state.t;
  return s;
}

OBState project_F(const OBState& state) {
  OBState f = state;
  f.phi.cos_part().row(0).setZero();
  f.tau.cos_part().row(0).setZero();
  return f;
}

SubspaceSplit split(const OBState& state, double pr, double ra) { return {project_S(state, pr, ra), project_F(state)}; }

OBState reconstruct(const SProfiles& s, int m_max) {
  const int n_max = s.n_max();
  OBState out = OBState::zero(m_max, n_max);
  if (std::abs(s.a[0]) > 0)
    throw InvalidArgument("a uniform horizontal flow cannot be represented by a sin-series stream function");
  for (int n = 1; n <= n_max; ++n) {
    out.phi.cos_part()(0, n) = -s.a[n] / (n * kPi);
    out.tau.cos_part()(0, n) = s.b[n];
  }
  out.t = s.t;
  return out;
}

SProfiles mean_values(const OBState& initial, double t, double pr, double ra) {
  SProfiles s0 = project_S(initial, pr, ra);
  s0.t = 0.0;
  return evolve(s0, t);
}

double poiseuille_profile(double c, double mu, double radius, double r) {
  if (!(mu > 0)) throw InvalidArgument("viscosity must be positive");
  if (!(radius > 0)) throw InvalidArgument("radius must be positive");
  if (r < 0 || r > radius) throw InvalidArgument("r outside the pipe");
  return c * (radius * radius - r * r) / (4 * mu);
}

double poiseuille_gradient_bound(double c, double mu, double radius) {
  if (!(mu > 0)) throw InvalidArgument("viscosity must be positive");
  if (!(radius > 0)) throw InvalidArgument("radius must be positive");
  return std::abs(c) * radius / (2 * mu);
}

}  // namespace convec::subspace
