#include <doctest.h>

#include <random>

#include "convec/stability_variational.hpp"
#include "oracles.hpp"

using namespace convec;
using namespace convec::annulus;
using namespace convec::stability;
using oracle::pi;

namespace {

Resolution small_res() {
  Resolution r;
  r.k_max = 4;
  r.n_r = 12;
  return r;
}

BaseState base_at(double ra, double d = 1.0) {
  const auto p = geometry(d, 1.0, ra);
  return ra > 0 ? steady_solve(p, small_res()) : conduction_state(p, small_res());
}

Eigen::VectorXd smooth_state(const PolarSpace& s, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  Eigen::VectorXd x(s.n_stream() + s.n_scalar());
  int i = 0;
  for (const auto& m : s.stream_modes()) x[i++] = u(rng) * std::pow(0.6, m.k + m.j);
  for (const auto& m : s.scalar_modes()) x[i++] = u(rng) * std::pow(0.6, m.k + m.j);
  return x;
}

// Production and dissipation by pointwise evaluation on an independent,
// denser tensor grid.
std::pair<double, double> quadrature_forms(const BaseState& base, const PolarSpace& s, const Eigen::VectorXd& x) {
  const auto& p = base.params;
  const PolarSpace bs = base.space();
  const int nu = s.n_stream();
  const Eigen::VectorXd a = x.head(nu), c = x.tail(s.n_scalar());
  const auto [rn, rw] = gauss_legendre(3 * s.resolution().n_r + 20, p.ri, p.ri + 1);
  const int nphi = 8 * s.resolution().k_max + 24;
  double prod = 0, diss = 0;
  for (int i = 0; i < rn.size(); ++i)
    for (int m = 0; m < nphi; ++m) {
      const double r = rn[i], phi = 2 * pi * m / nphi, w = rw[i] * r * 2 * pi / nphi;
      const auto u = s.velocity(a, r, phi);
      const auto sg = s.scalar(c, r, phi);
      const auto v0 = bs.velocity(base.stream, r, phi);
      const auto t0 = bs.scalar(base.temperature, r, phi);
      const double gx = u.vr * v0.dux_dr + u.vphi * v0.dux_dphi;
      const double gz = u.vr * v0.duz_dr + u.vphi * v0.duz_dphi;
      const double heat = u.uz + u.vr / (r * p.b) - u.vr * t0.dr - u.vphi * t0.dphi;
      prod += w * (std::sqrt(p.ra) * heat * sg.f - (gx * u.ux + gz * u.uz) / p.pr);
      diss += w * (u.dux_dr * u.dux_dr + u.dux_dphi * u.dux_dphi + u.duz_dr * u.duz_dr + u.duz_dphi * u.duz_dphi +
                   sg.dr * sg.dr + sg.dphi * sg.dphi);
    }
  return {prod, diss};
}

}  // namespace

TEST_CASE("functional examples") {
  std::mt19937 rng(7);
  SUBCASE("zero velocity with the conduction base gives zero production") {
    const auto base = base_at(0.0);
    const StabilityProblem prob(base, Family::Full);
    Eigen::VectorXd x = smooth_state(prob.space(), rng);
    x.head(prob.n_stream()).setZero();
    CHECK(prob.functional(x) == doctest::Approx(0.0));
  }
  SUBCASE("zero temperature with a resting base gives zero production") {
    const auto base = base_at(0.0);
    const StabilityProblem prob(base, Family::Full);
    Eigen::VectorXd x = smooth_state(prob.space(), rng);
    x.tail(prob.size() - prob.n_stream()).setZero();
    CHECK(std::abs(prob.functional(x)) < 1e-14);
  }
  SUBCASE("zero perturbation is rejected") {
    const StabilityProblem prob(base_at(0.0), Family::Full);
    CHECK_THROWS_AS(prob.functional(Eigen::VectorXd::Zero(prob.size())), InvalidArgument);
    CHECK_THROWS_AS(prob.functional(Eigen::VectorXd::Zero(3)), InvalidArgument);
  }
  SUBCASE("assembled forms match pointwise quadrature") {
    const auto base = base_at(800.0);
    for (Family fam : {Family::Full, Family::Even, Family::Odd}) {
      const StabilityProblem prob(base, fam);
      for (int trial = 0; trial < 3; ++trial) {
        const Eigen::VectorXd x = smooth_state(prob.space(), rng);
        const auto [pq, dq] = quadrature_forms(base, prob.space(), x);
        CHECK(prob.production_value(x) == doctest::Approx(pq).epsilon(1e-10));
        CHECK(prob.dissipation_value(x) == doctest::Approx(dq).epsilon(1e-10));
      }
    }
  }
  SUBCASE("homogeneous of degree zero") {
    const StabilityProblem prob(base_at(800.0), Family::Full);
    const Eigen::VectorXd x = smooth_state(prob.space(), rng);
    const double f = prob.functional(x);
    for (double s : {-3.0, 1e-4, 250.0}) CHECK(prob.functional(s * x) == doctest::Approx(f).epsilon(1e-12));
  }
}

TEST_CASE("maximum of the functional") {
  std::mt19937 rng(11);
  SUBCASE("resting base gives zero") {
    const auto rep = maximize_F(base_at(0.0));
    CHECK(rep.M == doctest::Approx(0.0));
    CHECK(rep.energy_stable);
    CHECK(rep.verdict() == "energy-stable");
  }
  SUBCASE("bounds every trial state and the two routes agree") {
    const auto base = base_at(1500.0);
    const auto rep = maximize_F(base);
    CHECK(rep.M == doctest::Approx(rep.M_eig).epsilon(1e-9));
    CHECK(rep.M_eig == doctest::Approx(2.0 / rep.lambda_c).epsilon(1e-12));
    CHECK(std::abs(rep.normalization - 1.0) < 1e-10);
    CHECK(rep.el_residual < 1e-8);
    const StabilityProblem prob(base, Family::Full);
    CHECK(prob.functional(rep.most_dangerous) == doctest::Approx(rep.M).epsilon(1e-10));
    for (int trial = 0; trial < 20; ++trial) CHECK(prob.functional(smooth_state(prob.space(), rng)) <= rep.M + 1e-12);
  }
  SUBCASE("increases with Ra and crosses one") {
    double last = -1;
    std::vector<bool> stable;
    for (double ra : {300.0, 1000.0, 2000.0, 3000.0}) {
      const auto rep = maximize_F(base_at(ra));
      CHECK(rep.M > last);
      last = rep.M;
      stable.push_back(rep.energy_stable);
    }
    CHECK(stable.front());
    CHECK_FALSE(stable.back());
  }
  SUBCASE("coupling pencil fixes M for a resting base") {
    auto b = base_at(0.0);
    b.params.ra = 900.0;
    const auto rep = maximize_F(b);
    CHECK(rep.M == doctest::Approx(std::sqrt(900.0) / (2 * rep.lambda_coupling)).epsilon(1e-9));
  }
  SUBCASE("maximizer breaks the reflection symmetry") {
    const auto rep = maximize_F(base_at(2000.0));
    CHECK(rep.label == SymmetryLabel::Odd);
    CHECK(rep.verdict() == "symmetry-breaking-possible");
  }
}

TEST_CASE("eigenvalue problem") {
  SUBCASE("eigenvalues are real") {
    const StabilityProblem prob(base_at(1500.0), Family::Full);
    Eigen::EigenSolver<Eigen::MatrixXd> es(prob.dissipation().ldlt().solve(prob.production()));
    const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
    CHECK(es.eigenvalues().imag().cwiseAbs().maxCoeff() < 1e-10 * scale);
  }
  SUBCASE("spectrum is symmetric about zero without base flow") {
    const auto base = base_at(0.0);
    // Ra enters only as a factor of the coupling, so rescale the resting base
    auto b = base;
    b.params.ra = 900.0;
    const auto sol = solve_eig(b, 4, false);
    auto mu = sol.production_ratios;
    const int n = static_cast<int>(mu.size());
    for (int i = 0; i < n; ++i) CHECK(mu[i] == doctest::Approx(-mu[n - 1 - i]).epsilon(1e-9).scale(mu.back()));
  }
  SUBCASE("split and unsplit solves agree") {
    const auto base = base_at(1500.0);
    const auto a = solve_eig(base, 3, true), b = solve_eig(base, 3, false);
    REQUIRE(a.lambdas.size() == b.lambdas.size());
    for (std::size_t i = 0; i < a.lambdas.size(); ++i) CHECK(a.lambdas[i] == doctest::Approx(b.lambdas[i]).epsilon(1e-9));
    for (auto l : a.labels) CHECK(l != SymmetryLabel::Mixed);
  }
  SUBCASE("eigenvectors solve the pencil") {
    const auto base = base_at(1500.0);
    const StabilityProblem full(base, Family::Full);
    const auto sol = solve_eig(base, 3);
    for (std::size_t i = 0; i < sol.lambdas.size(); ++i)
      CHECK(pencil_residual(full.dissipation(), 0.5 * full.production(), sol.vectors[i], sol.lambdas[i]) < 1e-9);
  }
  SUBCASE("LOBPCG reproduces a dense symmetric maximum") {
    std::mt19937 rng(3);
    std::normal_distribution<double> g;
    Eigen::MatrixXd a(30, 30), b(30, 30);
    for (int i = 0; i < 30; ++i)
      for (int j = 0; j < 30; ++j) a(i, j) = g(rng), b(i, j) = g(rng);
    const Eigen::MatrixXd n = a + a.transpose();
    const Eigen::MatrixXd gm = b * b.transpose() + 30 * Eigen::MatrixXd::Identity(30, 30);
    const auto r = maximize_quotient(n, gm);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(n, gm);
    CHECK(r.value == doctest::Approx(es.eigenvalues().maxCoeff()).epsilon(1e-10));
    CHECK(r.x.dot(gm * r.x) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("energy identity of the linearized dynamics") {
  std::mt19937 rng(5);
  const auto base = base_at(1500.0);
  const StabilityProblem prob(base, Family::Full);
  for (int trial = 0; trial < 4; ++trial) {
    const Eigen::VectorXd x = smooth_state(prob.space(), rng);
    const double d = prob.dissipation_value(x);
    CHECK(prob.energy_rate(x) == doctest::Approx((prob.functional(x) - 1.0) * d).epsilon(1e-9));
    const auto s = energy_slope(prob, x, 1e-6);
    CHECK(s.slope == doctest::Approx(s.identity).epsilon(1e-5));
  }
}

TEST_CASE("most dangerous perturbation") {
  SUBCASE("grows when M exceeds one") {
    const auto base = base_at(3000.0);
    const auto rep = maximize_F(base);
    REQUIRE(rep.M > 1.0);
    const StabilityProblem full(base, Family::Full);
    const auto s = most_dangerous_experiment(full, rep);
    CHECK(s.slope > 0);
    CHECK(s.slope == doctest::Approx(rep.M - 1.0).epsilon(1e-5));
  }
  SUBCASE("decays when M is below one") {
    const auto base = base_at(500.0);
    const auto rep = maximize_F(base);
    REQUIRE(rep.M < 1.0);
    const StabilityProblem full(base, Family::Full);
    CHECK(energy_slope(full, rep.most_dangerous, 1e-6).slope < 0);
    CHECK_THROWS_AS(most_dangerous_experiment(full, rep), InvalidArgument);
  }
}

TEST_CASE("planar-layer limit") {
  // classical rigid-rigid threshold Ra = 1707.762, a = 3.117
  const double expected = std::sqrt(1707.762);
  const auto s = solve_eig0(16, 1.0, 6.0);
  CHECK(s.lambda_c == doctest::Approx(expected).epsilon(1e-5));
  CHECK(s.wavenumber == doctest::Approx(3.117).epsilon(1e-3));
  CHECK(s.label == SymmetryLabel::Even);
  SUBCASE("spectrum is symmetric") {
    const auto t = solve_eig0_at(12, 3.0);
    const auto& sp = t.spectrum;
    const int n = static_cast<int>(sp.size());
    for (int i = 0; i < n; ++i)
      if (std::isfinite(sp[i])) CHECK(sp[i] == doctest::Approx(-sp[n - 1 - i]).epsilon(1e-8));
  }
  SUBCASE("converged in the radial resolution") {
    const double a = 3.0;
    CHECK(std::abs(solve_eig0_at(12, a).lambda_c - solve_eig0_at(24, a).lambda_c) < 1e-9 * expected);
  }
  SUBCASE("input checks") {
    CHECK_THROWS_AS(solve_eig0_at(1, 3.0), InvalidArgument);
    CHECK_THROWS_AS(solve_eig0_at(8, 0.0), InvalidArgument);
    CHECK_THROWS_AS(solve_eig0(8, 3.0, 2.0), InvalidArgument);
  }
}
