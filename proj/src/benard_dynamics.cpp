#include "convec/benard_dynamics.hpp"

#include <cmath>

namespace convec::benard {

namespace {

using spectral::laplacian_symbol;

struct Tendency {
  SpectralField phi;
  SpectralField tau;
};

// Explicit part of the right-hand side: buoyancy, source and advection.
Tendency explicit_tendency(const OBState& s, double pr, double ra) {
  const NonlinearTerms nl = nonlinear_term(s);
  SpectralField buoy = spectral::d_dx(s.tau);
  for (int m = 0; m <= buoy.m_max(); ++m)
    for (int n = 1; n <= buoy.n_max(); ++n) {
      const double w = pr * ra / -laplacian_symbol(m, n);
      buoy.cos_part()(m, n) *= w;
      buoy.sin_part()(m, n) *= w;
    }
  Tendency t{-1.0 * buoy - nl.momentum, spectral::d_dx(s.phi) - nl.heat};
  t.phi.enforce_structure();
  t.tau.enforce_structure();
  return t;
}

// exp(-rate * dt) per mode.
struct DiffusionFactors {
  Eigen::MatrixXd phi;
  Eigen::MatrixXd tau;

  DiffusionFactors(int m_max, int n_max, double pr, double dt)
      : phi(m_max + 1, n_max + 1), tau(m_max + 1, n_max + 1) {
    for (int m = 0; m <= m_max; ++m)
      for (int n = 0; n <= n_max; ++n) {
        const double k2 = -laplacian_symbol(m, n);
        phi(m, n) = std::exp(-pr * k2 * dt);
        tau(m, n) = std::exp(-k2 * dt);
      }
  }

  void apply(SpectralField& phi_f, SpectralField& tau_f) const {
    phi_f.cos_part().array() *= phi.array();
    phi_f.sin_part().array() *= phi.array();
    tau_f.cos_part().array() *= tau.array();
    tau_f.sin_part().array() *= tau.array();
  }
};

// Integrating-factor Heun step given a tendency evaluator.
template <class Rhs>
OBState if_rk2(const OBState& s, double dt, const DiffusionFactors& ef, Rhs&& rhs) {
  const Tendency n0 = rhs(s, 0.0);
  OBState stage = s;
  stage.phi += dt * n0.phi;
  stage.tau += dt * n0.tau;
  ef.apply(stage.phi, stage.tau);
  stage.t = s.t + dt;
  const Tendency n1 = rhs(stage, dt);

  OBState out = s;
  out.phi += 0.5 * dt * n0.phi;
  out.tau += 0.5 * dt * n0.tau;
  ef.apply(out.phi, out.tau);
  out.phi += 0.5 * dt * n1.phi;
  out.tau += 0.5 * dt * n1.tau;
  out.t = s.t + dt;
  if (!out.all_finite()) throw BlowUp("non-finite state", out.t);
  return out;
}

void zero_mean_rows(SpectralField& f) { f.cos_part().row(0).setZero(); }

}  // namespace

NonlinearTerms nonlinear_term(const OBState& state) {
  const VelocityField v = state.velocity();
  const SpectralField vorticity = spectral::laplacian(state.phi);
  // curl(v . grad v) = v . grad omega; projecting onto curl(xi_mn) divides by -k^2.
  SpectralField momentum = spectral::advect(v, vorticity);
  for (int m = 0; m <= momentum.m_max(); ++m)
    for (int n = 1; n <= momentum.n_max(); ++n) {
      const double w = 1.0 / laplacian_symbol(m, n);
      momentum.cos_part()(m, n) *= w;
      momentum.sin_part()(m, n) *= w;
    }
  momentum.enforce_structure();
  SpectralField heat = spectral::advect(v, state.tau);
  heat.enforce_structure();
  return {momentum, heat};
}

OBState step(const OBState& state, const OBParams& params) {
  const DiffusionFactors ef(state.m_max(), state.n_max(), params.pr, params.dt);
  return if_rk2(state, params.dt, ef,
                [&](const OBState& s, double) { return explicit_tendency(s, params.pr, params.ra); });
}

SplitState step_split(const SplitState& state, const OBParams& params) {
  const int m_max = state.f_part.m_max();
  const DiffusionFactors ef(m_max, state.f_part.n_max(), params.pr, params.dt);
  const subspace::SProfiles s0 = state.s_part;
  const subspace::SProfiles s1 = subspace::evolve(s0, params.dt);
  const OBState mean0 = subspace::reconstruct(s0, m_max);
  const OBState mean1 = subspace::reconstruct(s1, m_max);

  auto rhs = [&](const OBState& f, double offset) {
    const OBState& mean = offset == 0.0 ? mean0 : mean1;
    OBState full = f;
    full.phi += mean.phi;
    full.tau += mean.tau;
    Tendency t = explicit_tendency(full, params.pr, params.ra);
    zero_mean_rows(t.phi);
    zero_mean_rows(t.tau);
    return t;
  };

  SplitState out{if_rk2(state.f_part, params.dt, ef, rhs), s1};
  zero_mean_rows(out.f_part.phi);
  zero_mean_rows(out.f_part.tau);
  return out;
}

Trajectory simulate(const OBState& initial, const OBParams& params, int sample_every,
                    const std::function<void(const OBState&)>& observer) {
  params.validate();
  if (sample_every < 1) throw InvalidArgument("sample_every must be >= 1");
  if (initial.m_max() != params.m_max || initial.n_max() != params.n_max)
    throw InvalidArgument("initial state truncation does not match the parameters");
  const long steps = std::lround(params.t_end / params.dt);
  const DiffusionFactors ef(params.m_max, params.n_max, params.pr, params.dt);
  auto rhs = [&](const OBState& s, double) { return explicit_tendency(s, params.pr, params.ra); };

  Trajectory traj;
  auto sample = [&](const OBState& s) {
    traj.states.push_back(s);
    traj.records.push_back(energy::benard_record(s, params.pr, params.ra));
    if (observer) observer(s);
  };

  OBState s = initial;
  sample(s);
  for (long i = 1; i <= steps; ++i) {
    s = if_rk2(s, params.dt, ef, rhs);
    if (i % sample_every == 0) sample(s);
  }
  if (traj.records.size() >= 3) energy::energy_identity_residual(traj.records);
  return traj;
}

}  // namespace convec::benard
