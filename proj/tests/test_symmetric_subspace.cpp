#include <doctest.h>

#include <random>

#include "convec/symmetric_subspace.hpp"
#include "oracles.hpp"

using namespace convec;
using namespace convec::subspace;
using spectral::FieldKind;
using oracle::pi;

namespace {

Eigen::VectorXd sample(int nz, const auto& f) {
  const Eigen::VectorXd z = profile_grid(nz);
  Eigen::VectorXd v(nz);
  for (int j = 0; j < nz; ++j) v[j] = f(z[j]);
  return v;
}

benard::OBState random_state(int m_max, int n_max, std::mt19937& rng) {
  return {oracle::random_field(FieldKind::StreamLike, m_max, n_max, m_max, n_max, rng),
          oracle::random_field(FieldKind::StreamLike, m_max, n_max, m_max, n_max, rng), 0.0};
}

}  // namespace

TEST_CASE("single cosine velocity profile decays with the Prandtl-weighted rate") {
  const int N = 8, nz = 32;
  const double pr = 0.7, t = 0.05;
  const auto f = sample(nz, [](double z) { return std::cos(pi * z); });
  const auto g = sample(nz, [](double) { return 0.0; });
  const auto s = evolve_S_analytic(f, g, t, pr, 3.0, N);
  for (double z : {0.0, 0.3, 0.8}) {
    CHECK(s.velocity(z) == doctest::Approx(std::cos(pi * z) * std::exp(-pr * pi * pi * t)));
    CHECK(s.temperature(z) == doctest::Approx(0.0));
    CHECK(s.pressure(z) == doctest::Approx(0.0));
  }
}

TEST_CASE("at t = 0 the series reproduce the projections of the data") {
  const int N = 6, nz = 16;
  const auto f = sample(nz, [](double z) { return 0.3 + std::cos(2 * pi * z) - 0.5 * std::cos(5 * pi * z); });
  const auto g = sample(nz, [](double z) { return std::sin(pi * z) + 0.25 * std::sin(4 * pi * z); });
  const auto s = evolve_S_analytic(f, g, 0.0, 1.3, 10.0, N);
  for (double z : {0.1, 0.45, 0.9}) {
    CHECK(s.velocity(z) == doctest::Approx(0.3 + std::cos(2 * pi * z) - 0.5 * std::cos(5 * pi * z)));
    CHECK(s.temperature(z) == doctest::Approx(std::sin(pi * z) + 0.25 * std::sin(4 * pi * z)));
  }
  CHECK(s.a[0] == doctest::Approx(0.3));
}

TEST_CASE("temperature mode and its hydrostatic pressure") {
  const int N = 4, nz = 16;
  const double t = 0.02;
  const auto f = sample(nz, [](double) { return 0.0; });
  const auto g = sample(nz, [](double z) { return std::sin(pi * z); });
  const auto s = evolve_S_analytic(f, g, t, 2.0, pi, N);
  const double decay = std::exp(-pi * pi * t);
  for (double z : {0.0, 0.25, 0.6, 1.0}) {
    CHECK(s.temperature(z) == doctest::Approx(std::sin(pi * z) * decay));
    // G - G0 = decay (1 - cos pi z); the zero-mean gauge fixes G0 = -decay.
    CHECK(s.pressure(z) - s.pressure(0.0) == doctest::Approx(decay * (1 - std::cos(pi * z))).epsilon(1e-12));
  }
}

TEST_CASE("pressure profile satisfies G'' = Ra T'") {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  SProfiles s = SProfiles::zero(10, 0.9, 750.0);
  for (int n = 1; n <= 10; ++n) s.b[n] = u(rng);
  s = evolve(s, 0.01);
  for (double z : {0.0, 0.13, 0.5, 0.88})
    CHECK(std::abs(s.pressure_dzz(z) - s.ra * s.temperature_dz(z)) < 1e-10);
}

TEST_CASE("non-finite profile samples are rejected") {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(8), g = Eigen::VectorXd::Zero(8);
  f[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(evolve_S_analytic(f, g, 0.1, 1.0, 1.0, 3), InvalidArgument);
  f[3] = 0;
  g[2] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(evolve_S_analytic(f, g, 0.1, 1.0, 1.0, 3), InvalidArgument);
}

TEST_CASE("decay is monotone and bounded by the slowest rate") {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  for (double pr : {0.3, 1.0, 4.0}) {
    SProfiles s = SProfiles::zero(8, pr, 1.0);
    for (int n = 1; n <= 8; ++n) {
      s.a[n] = u(rng);
      s.b[n] = u(rng);
    }
    const double a0 = s.a.squaredNorm(), b0 = s.b.squaredNorm();
    double prev_a = a0, prev_b = b0;
    for (double t : {0.001, 0.01, 0.05, 0.2}) {
      const auto st = evolve(s, t);
      const double rate = std::min(pr, 1.0) * pi * pi * t;
      CHECK(st.a.squaredNorm() <= prev_a);
      CHECK(st.b.squaredNorm() <= prev_b);
      CHECK(std::sqrt(st.a.squaredNorm()) <= std::exp(-rate) * std::sqrt(a0) * (1 + 1e-14));
      CHECK(std::sqrt(st.b.squaredNorm()) <= std::exp(-rate) * std::sqrt(b0) * (1 + 1e-14));
      prev_a = st.a.squaredNorm();
      prev_b = st.b.squaredNorm();
    }
  }
}

TEST_CASE("projections onto S and its complement") {
  std::mt19937 rng(4);
  SUBCASE("pure S state has no fluctuating part") {
    auto st = benard::OBState::zero(3, 4);
    st.phi.set({0, 2, 1}, 0.7);
    st.tau.set({0, 1, 1}, -0.2);
    const auto f = project_F(st);
    CHECK(f.phi.max_abs() == 0.0);
    CHECK(f.tau.max_abs() == 0.0);
  }
  SUBCASE("single fluctuating mode has no S part") {
    auto st = benard::OBState::zero(3, 4);
    st.phi.set({1, 1, 1}, 1.0);
    const auto s = project_S(st, 1.0, 1.0);
    CHECK(s.a.cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.b.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("direct sum reconstructs the state") {
    for (int trial = 0; trial < 10; ++trial) {
      const auto st = random_state(4, 5, rng);
      const auto sp = split(st, 1.0, 100.0);
      const auto back = reconstruct(sp.s_part, 4);
      CHECK((back.phi + sp.f_part.phi - st.phi).max_abs() < 1e-13);
      CHECK((back.tau + sp.f_part.tau - st.tau).max_abs() < 1e-13);
    }
  }
  SUBCASE("complement fields have zero x-average at every height") {
    const oracle::CellQuadrature quad(40, 20);
    for (int trial = 0; trial < 3; ++trial) {
      const auto f = project_F(random_state(4, 5, rng));
      const auto v = f.velocity();
      for (double z : {0.1, 0.42, 0.77}) {
        double avg_vx = 0, avg_vz = 0, avg_tau = 0;
        for (int i = 0; i < quad.x.size(); ++i) {
          avg_vx += quad.wx[i] * spectral::evaluate(v.vx, quad.x[i], z);
          avg_vz += quad.wx[i] * spectral::evaluate(v.vz, quad.x[i], z);
          avg_tau += quad.wx[i] * oracle::jet(f.tau, quad.x[i], z).f;
        }
        CHECK(std::abs(avg_vx) < 1e-13);
        CHECK(std::abs(avg_vz) < 1e-13);
        CHECK(std::abs(avg_tau) < 1e-13);
      }
    }
  }
  SUBCASE("temperature constant in x lies in S") {
    auto st = benard::OBState::zero(3, 4);
    st.tau.set({0, 3, 1}, 2.0);
    CHECK(project_F(st).tau.max_abs() == 0.0);
  }
}

TEST_CASE("mean values come from the x-averaged initial data") {
  const int M = 3, N = 6;
  const double pr = 1.7, t = 0.03;
  // v^x = cos(pi z) + sin(2 pi x) sin(pi z)  <=>  Phi = -sin(pi z)/pi + (stream of the m = 1 part)
  auto st = benard::OBState::zero(M, N);
  st.phi.set({0, 1, 1}, -1.0 / pi);
  st.phi.set({1, 1, -1}, 0.4);
  st.tau.set({2, 3, 1}, 0.9);
  const auto mv = mean_values(st, t, pr, 50.0);
  for (double z : {0.0, 0.3, 0.7})
    CHECK(mv.velocity(z) == doctest::Approx(std::cos(pi * z) * std::exp(-pr * pi * pi * t)));
  CHECK(mv.b.cwiseAbs().maxCoeff() == 0.0);

  auto fl = benard::OBState::zero(M, N);
  fl.phi.set({1, 2, 1}, 1.0);
  fl.tau.set({2, 1, -1}, 1.0);
  const auto zero = mean_values(fl, 0.1, 1.0, 1.0);
  CHECK(zero.a.cwiseAbs().maxCoeff() == 0.0);
  CHECK(zero.b.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Poiseuille profile and its gradient bound") {
  CHECK(poiseuille_profile(3.0, 2.0, 1.5, 1.5) == doctest::Approx(0.0));
  CHECK(poiseuille_profile(3.0, 2.0, 1.5, 0.0) == doctest::Approx(3.0 * 1.5 * 1.5 / 8.0));
  CHECK(poiseuille_profile(4.0, 1.0, 1.0, 0.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(poiseuille_profile(1.0, 1.0, 1.0, 1.1), InvalidArgument);
  CHECK_THROWS_AS(poiseuille_profile(1.0, 0.0, 1.0, 0.5), InvalidArgument);

  CHECK(poiseuille_gradient_bound(0.0, 1.0, 1.0) == 0.0);
  CHECK(poiseuille_gradient_bound(4.0, 1.0, 1.0) == doctest::Approx(2.0));
  for (double c : {-3.0, 0.5, 7.0}) {
    const double bound = poiseuille_gradient_bound(c, 0.8, 1.3);
    double sampled = 0;
    for (int i = 0; i <= 2000; ++i) {
      const double r = 1.3 * i / 2000.0, h = 1e-6;
      const double lo = std::max(0.0, r - h), hi = std::min(1.3, r + h);
      sampled = std::max(sampled, std::abs(poiseuille_profile(c, 0.8, 1.3, hi) - poiseuille_profile(c, 0.8, 1.3, lo)) /
                                      (hi - lo));
    }
    CHECK(sampled <= bound * (1 + 1e-6));
    CHECK(sampled >= bound * (1 - 1e-4));
  }
}
