#include "convec/energy_analysis.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace convec::energy {

namespace {

constexpr double kPi = std::numbers::pi;
using spectral::FieldKind;

void require_energy_params(double pr, double ra) {
  if (!(pr > 0)) throw InvalidArgument("Pr must be positive");
  if (!(ra > 0)) throw InvalidArgument("the weighted energy needs Ra > 0");
}

}  // namespace

double energy_benard(const VelocityField& u, const SpectralField& sigma, double pr, double ra) {
  require_energy_params(pr, ra);
  return (spectral::norm_sq(u.vx) + spectral::norm_sq(u.vz)) / pr + ra * spectral::norm_sq(sigma);
}

double energy_benard_stream(const SpectralField& psi, const SpectralField& sigma, double pr, double ra) {
  require_energy_params(pr, ra);
  return spectral::grad_norm_sq(psi) / pr + ra * spectral::norm_sq(sigma);
}

double energy_annulus(double u_norm_sq, double sigma_norm_sq, double pr) {
  if (!(pr > 0)) throw InvalidArgument("Pr must be positive");
  if (u_norm_sq < 0 || sigma_norm_sq < 0) throw InvalidArgument("squared norms must be non-negative");
  return 0.5 * u_norm_sq / pr + 0.5 * sigma_norm_sq;
}

EnergyRecord benard_record(const OBState& state, double pr, double ra) {
  if (!(pr > 0)) throw InvalidArgument("Pr must be positive");
  const int m_max = state.m_max(), n_max = state.n_max();
  const auto s = subspace::project_S(state, pr, ra);
  const auto f = subspace::project_F(state);
  const auto u = f.velocity();

  // A' (sin series) and T' (cos series) as m = 0 fields.
  SpectralField a_z(FieldKind::StreamLike, m_max, n_max);
  SpectralField t_z(FieldKind::PressureLike, m_max, n_max);
  for (int n = 1; n <= n_max; ++n) {
    a_z.cos_part()(0, n) = -s.a[n] * n * kPi;
    t_z.cos_part()(0, n) = s.b[n] * n * kPi;
  }

  EnergyRecord r;
  r.t = state.t;
  r.E = spectral::grad_norm_sq(f.phi) / pr + ra * spectral::norm_sq(f.tau);
  r.grad_u_sq = spectral::norm_sq(spectral::laplacian(f.phi));
  r.grad_sigma_sq = spectral::grad_norm_sq(f.tau);

  const double buoyancy = spectral::inner(u.vz, f.tau);
  const double mean_gradient = spectral::inner(spectral::multiply(u.vz, t_z), f.tau);
  const double shear = spectral::inner(spectral::multiply(u.vx, u.vz), a_z);
  const double dissipation = 2 * (r.grad_u_sq + ra * r.grad_sigma_sq);
  const double production = 2 * (2 * ra * buoyancy - ra * mean_gradient - shear / pr);
  r.rhs = production - dissipation;
  r.F_value = dissipation > 0 ? production / dissipation : 0.0;
  return r;
}

std::vector<double> identity_residuals(std::span<const double> t, std::span<const double> E,
                                       std::span<const double> rhs) {
  const std::size_t n = t.size();
  if (E.size() != n || rhs.size() != n) throw InvalidArgument("sample series differ in length");
  if (n < 3) throw InvalidArgument("the energy identity needs at least 3 samples");
  const double h = (t[n - 1] - t[0]) / static_cast<double>(n - 1);
  if (!(h > 0)) throw InvalidArgument("sample times must increase");
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs((t[i] - t[i - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h)))
      throw InvalidArgument("energy samples must be uniformly spaced");

  std::vector<double> out(n, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 1; i + 1 < n; ++i) {
    double dEdt;
    if (i >= 2 && i + 2 < n)
      dEdt = (-E[i + 2] + 8 * E[i + 1] - 8 * E[i - 1] + E[i - 2]) / (12 * h);
    else if (n < 5)
      dEdt = (E[i + 1] - E[i - 1]) / (2 * h);
    else
      continue;
    out[i] = std::abs(dEdt - rhs[i]);
  }
  return out;
}

std::vector<double> energy_identity_residual(std::vector<EnergyRecord>& records) {
  std::vector<double> t, e, rhs;
  for (const auto& r : records) {
    t.push_back(r.t);
    e.push_back(r.E);
    rhs.push_back(r.rhs);
  }
  auto res = identity_residuals(t, e, rhs);
  for (std::size_t i = 0; i < records.size(); ++i) records[i].residual = res[i];
  return res;
}

std::vector<EnergyRecord> energy_identity_residual(std::span<const OBState> trajectory, double pr, double ra) {
  std::vector<EnergyRecord> records;
  records.reserve(trajectory.size());
  for (const auto& s : trajectory) records.push_back(benard_record(s, pr, ra));
  energy_identity_residual(records);
  return records;
}

AprioriReport check_apriori_bounds(const Eigen::VectorXd& a, double pr, std::span<const double> times) {
  if (!(pr > 0)) throw InvalidArgument("Pr must be positive");
  if (!a.allFinite()) throw InvalidArgument("profile coefficients must be finite");
  AprioriReport rep;
  // ||cos(n pi z)||^2 = 1/2 on (0,1) for n >= 1.
  double g2 = 0, c2 = 0;
  for (int n = 1; n < a.size(); ++n) {
    const double k = n * kPi;
    g2 += 0.5 * std::pow(a[n] * k, 2);
    c2 += 0.5 * std::pow(a[n] * k * k, 2);
  }
  rep.grad_bound = std::sqrt(g2);
  rep.curvature_bound = std::sqrt(c2);
  for (double t : times) {
    if (t < 0) throw InvalidArgument("times must be non-negative");
    double gt = 0, ct = 0;
    for (int n = 1; n < a.size(); ++n) {
      const double k = n * kPi;
      const double decay = std::exp(-pr * k * k * t);
      gt += 0.5 * std::pow(a[n] * k * decay, 2);
      ct += 0.5 * std::pow(a[n] * k * k * decay, 2);
    }
    rep.grad_sup = std::max(rep.grad_sup, std::sqrt(gt));
    rep.curvature_sup = std::max(rep.curvature_sup, std::sqrt(ct));
  }
  return rep;
}

}  // namespace convec::energy
