#include <doctest.h>

#include <random>

#include "convec/annulus_basestate.hpp"
#include "oracles.hpp"

using namespace convec;
using namespace convec::annulus;
using oracle::pi;

namespace {

Eigen::VectorXd random_vector(int n, std::mt19937& rng, double amp = 1.0) {
  std::uniform_real_distribution<double> u(-amp, amp);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

// Geometric decay keeps random states smooth.
Eigen::VectorXd smooth_random(const std::vector<Mode>& modes, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  Eigen::VectorXd v(static_cast<Eigen::Index>(modes.size()));
  for (std::size_t i = 0; i < modes.size(); ++i) v[i] = u(rng) * std::pow(0.5, modes[i].k + modes[i].j);
  return v;
}

double d1_6(const auto& f, double x, double h) {
  return (-f(x - 3 * h) + 9 * f(x - 2 * h) - 45 * f(x - h) + 45 * f(x + h) - 9 * f(x + 2 * h) + f(x + 3 * h)) / (60 * h);
}

double d2_6(const auto& f, double x, double h) {
  return (2 * f(x - 3 * h) - 27 * f(x - 2 * h) + 270 * f(x - h) - 490 * f(x) + 270 * f(x + h) - 27 * f(x + 2 * h) +
          2 * f(x + 3 * h)) /
         (180 * h * h);
}

}  // namespace

TEST_CASE("geometry of the nondimensional annulus") {
  const auto p = geometry(2.0);
  CHECK(p.b == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(p.b == doctest::Approx(0.693147).epsilon(1e-6));
  CHECK(p.ri == 1.0);
  CHECK(p.ro == 2.0);
  CHECK(p.eps == doctest::Approx(1.0 / std::log(2.0)));
  CHECK(std::log(p.ro / p.ri) == doctest::Approx(p.b));
  double prev = geometry(0.1).b;
  for (double d : {1.0, 10.0, 100.0, 1e4}) {
    const double b = geometry(d).b;
    CHECK(b < prev);
    CHECK(b > 0);
    prev = b;
  }
  CHECK(prev < 2.1e-4);
  CHECK_THROWS_AS(geometry(0.0), InvalidArgument);
  CHECK_THROWS_AS(geometry(-1.0), InvalidArgument);
}

TEST_CASE("dimensionless groups") {
  PhysicalParams p{1e-6, 1.4e-7, 2e-4, 9.81, 1.0, 0.01};
  const auto g = nondimensionalize(p);
  CHECK(g.pr == doctest::Approx(7.142857142857).epsilon(1e-12));
  CHECK(g.ra == doctest::Approx(14014.2857142857).epsilon(1e-12));
  p.diffusivity = p.nu;
  CHECK(nondimensionalize(p).pr == 1.0);
  p.d_theta = 0.0;
  CHECK(nondimensionalize(p).ra == 0.0);
  p.nu = 0.0;
  CHECK_THROWS_AS(nondimensionalize(p), InvalidArgument);
  p.nu = 1e-6;
  p.diffusivity = -1.0;
  CHECK_THROWS_AS(nondimensionalize(p), InvalidArgument);
}

TEST_CASE("conduction profile") {
  CHECK(conduction_lift(1.0, 1.0, 0.0, 1.0, 2.0) == 1.0);
  CHECK(conduction_lift(2.0, 1.0, 0.0, 1.0, 2.0) == doctest::Approx(0.0));
  CHECK(conduction_lift(1.5, 1.0, 0.0, 1.0, 2.0) == doctest::Approx(0.415037).epsilon(1e-6));
  CHECK(conduction_lift(1.5, 1.0, 0.0, 1.0, 2.0) == doctest::Approx(1 - std::log(1.5) / std::log(2.0)));
  CHECK_THROWS_AS(conduction_lift(0.9, 1.0, 0.0, 1.0, 2.0), InvalidArgument);
  CHECK_THROWS_AS(conduction_lift(2.1, 1.0, 0.0, 1.0, 2.0), InvalidArgument);
  // harmonic: T'' + T'/r = 0
  const auto f = [](double r) { return conduction_lift(r, 1.0, 0.0, 1.0, 2.0); };
  for (double r = 1.1; r < 1.95; r += 0.1) CHECK(std::abs(d2_6(f, r, 1e-2) + d1_6(f, r, 1e-2) / r) < 1e-10);
}

TEST_CASE("radial bases satisfy the wall conditions") {
  for (double s : {-1.0, 1.0}) {
    const auto t = legendre(40, s);
    for (int j = 0; j < 36; ++j) {
      CHECK(std::abs(dirichlet_function(t, j).f) < 1e-15);
      CHECK(std::abs(clamped_function(t, j).f) < 1e-14);
      CHECK(std::abs(clamped_function(t, j).d1) < 1e-12);
    }
  }
  // Legendre recurrence against closed forms
  const auto t = legendre(4, 0.3);
  CHECK(t.p[2] == doctest::Approx(0.5 * (3 * 0.09 - 1)));
  CHECK(t.d1[3] == doctest::Approx(0.5 * (15 * 0.09 - 3)));
  CHECK(t.d2[4] == doctest::Approx((105 * 0.09 - 15) / 2.0));
}

TEST_CASE("velocity jets agree with finite differences and are divergence-free") {
  const PolarSpace space(0.5, Resolution{4, 6}, Family::Full);
  std::mt19937 rng(3);
  const Eigen::VectorXd a = random_vector(space.n_stream(), rng);
  const double h = 1e-4;
  for (double r : {0.6, 0.93, 1.3})
    for (double phi : {0.2, 1.9, 4.4}) {
      const auto v = space.velocity(a, r, phi);
      const auto ux = [&](double rr, double pp) { return space.velocity(a, rr, pp).ux; };
      const auto uz = [&](double rr, double pp) { return space.velocity(a, rr, pp).uz; };
      const double scale = 1 + std::abs(v.dux_dr) + std::abs(v.duz_dr);
      CHECK(std::abs(v.dux_dr - (ux(r + h, phi) - ux(r - h, phi)) / (2 * h)) < 1e-6 * scale);
      CHECK(std::abs(v.duz_dr - (uz(r + h, phi) - uz(r - h, phi)) / (2 * h)) < 1e-6 * scale);
      CHECK(std::abs(v.dux_dphi - (ux(r, phi + h) - ux(r, phi - h)) / (2 * h * r)) < 1e-6 * scale);
      CHECK(std::abs(v.duz_dphi - (uz(r, phi + h) - uz(r, phi - h)) / (2 * h * r)) < 1e-6 * scale);
      CHECK(std::abs(v.ux - (v.vr * std::cos(phi) - v.vphi * std::sin(phi))) < 1e-14 * scale);
      // (1/r) d_r (r v^r) + (1/r) d_phi v^phi
      CHECK(std::abs(v.dvr_dr + v.vr / r + v.dvphi_dphi / r) < 1e-12 * scale);
      // Cartesian divergence from the Cartesian gradients
      const double c = std::cos(phi), s = std::sin(phi);
      const double div = c * v.dux_dr - s * v.dux_dphi + s * v.duz_dr + c * v.duz_dphi;
      CHECK(std::abs(div) < 1e-12 * scale);
    }
  for (double r : {space.r_inner(), space.r_outer()})
    for (double phi : {0.0, 1.0, 3.0}) {
      const auto v = space.velocity(a, r, phi);
      CHECK(std::abs(v.vr) < 1e-13);
      CHECK(std::abs(v.vphi) < 1e-12);
    }
  CHECK_THROWS_AS(space.velocity(a, 0.4, 0.0), InvalidArgument);
}

TEST_CASE("velocity stiffness equals the enstrophy") {
  const PolarSpace space(0.5, Resolution{4, 8}, Family::Full);
  std::mt19937 rng(17);
  for (int trial = 0; trial < 3; ++trial) {
    const Eigen::VectorXd a = smooth_random(space.stream_modes(), rng);
    const auto& t = space.vt();
    const Eigen::ArrayXd c = space.qphi().array().cos(), s = space.qphi().array().sin();
    // omega = d_x u^z - d_z u^x with d_x = c d_r - s d_phi/r, d_z = s d_r + c d_phi/r
    const Eigen::ArrayXd omega = c * (t.duz_dr * a).array() - s * (t.duz_dphi * a).array() -
                                 s * (t.dux_dr * a).array() - c * (t.dux_dphi * a).array();
    const double enstrophy = (space.qw().array() * omega.square()).sum();
    CHECK(a.dot(space.velocity_stiffness() * a) == doctest::Approx(enstrophy).epsilon(1e-10));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(space.velocity_stiffness());
  CHECK(es.eigenvalues().minCoeff() > 0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> et(space.scalar_stiffness());
  CHECK(et.eigenvalues().minCoeff() > 0);
}

TEST_CASE("reflection symmetry of fields") {
  const Resolution res{5, 6};
  std::mt19937 rng(5);
  const Eigen::VectorXd nodes = lobatto_nodes(1.0, 9);
  SUBCASE("even family is symmetric, odd family antisymmetric") {
    const PolarSpace even(1.0, res, Family::Even), odd(1.0, res, Family::Odd);
    const auto fe =
        to_polar_field(even, random_vector(even.n_stream(), rng), random_vector(even.n_scalar(), rng), nodes);
    const auto fo = to_polar_field(odd, random_vector(odd.n_stream(), rng), random_vector(odd.n_scalar(), rng), nodes);
    CHECK(symmetry_residual(fe) < 1e-13);
    CHECK(antisymmetry_residual(fo) < 1e-13);
    CHECK(symmetry_residual(fo) > 1e-3);
    CHECK(even.n_stream() + odd.n_stream() == PolarSpace(1.0, res, Family::Full).n_stream());
    CHECK(even.n_scalar() + odd.n_scalar() == PolarSpace(1.0, res, Family::Full).n_scalar());
  }
  SUBCASE("symmetrize projects random fields and is idempotent") {
    const PolarSpace full(1.0, res, Family::Full);
    for (int trial = 0; trial < 5; ++trial) {
      const auto f =
          to_polar_field(full, random_vector(full.n_stream(), rng), random_vector(full.n_scalar(), rng), nodes);
      CHECK(symmetry_residual(f) > 1e-3);
      const auto g = symmetrize(f);
      CHECK(symmetry_residual(g) < 1e-13);
      const auto g2 = symmetrize(g);
      CHECK((g2.vr_cos - g.vr_cos).cwiseAbs().maxCoeff() == 0.0);
      CHECK((g2.vphi_sin - g.vphi_sin).cwiseAbs().maxCoeff() == 0.0);
      CHECK((g2.tau_cos - g.tau_cos).cwiseAbs().maxCoeff() == 0.0);
      // pointwise: average of the field and its reflected image
      for (double phi : {0.3, 2.0}) {
        const auto a = f.at(4, phi), b = f.at(4, pi - phi), m = g.at(4, phi);
        CHECK(m[0] == doctest::Approx(0.5 * (a[0] + b[0])));
        CHECK(m[1] == doctest::Approx(0.5 * (a[1] - b[1])));
        CHECK(m[2] == doctest::Approx(0.5 * (a[2] + b[2])));
      }
    }
  }
  SUBCASE("coefficient reflection matches pointwise reflection") {
    const PolarSpace full(1.0, res, Family::Full);
    const Eigen::VectorXd a = random_vector(full.n_stream(), rng), c = random_vector(full.n_scalar(), rng);
    const Eigen::VectorXd ra = reflect_stream(full, a), rc = reflect_scalar(full, c);
    for (double r : {1.2, 1.7})
      for (double phi : {0.4, 2.5}) {
        const auto v = full.velocity(a, r, pi - phi), w = full.velocity(ra, r, phi);
        CHECK(w.vr == doctest::Approx(v.vr));
        CHECK(w.vphi == doctest::Approx(-v.vphi));
        CHECK(full.scalar(rc, r, phi).f == doctest::Approx(full.scalar(c, r, pi - phi).f));
      }
  }
}

TEST_CASE("vertical velocity component") {
  const Eigen::VectorXd nodes = lobatto_nodes(1.0, 3);
  auto f = PolarField::zero(2, nodes);
  f.vr_cos(0, 1) = 1.0;
  Eigen::VectorXd phis(1);
  phis << pi / 2;
  CHECK(vertical_components(f, phis)(1, 0) == doctest::Approx(1.0));
  f = PolarField::zero(2, nodes);
  f.vphi_cos(0, 1) = 1.0;
  phis << 0.0;
  CHECK(vertical_components(f, phis)(1, 0) == doctest::Approx(1.0));

  const PolarSpace full(1.0, Resolution{4, 5}, Family::Full);
  std::mt19937 rng(8);
  const Eigen::VectorXd a = random_vector(full.n_stream(), rng);
  const Eigen::VectorXd r = lobatto_nodes(1.0, 7);
  const auto g = to_polar_field(full, a, Eigen::VectorXd::Zero(full.n_scalar()), r);
  Eigen::VectorXd ph(4);
  ph << 0.1, 1.3, 2.9, 5.0;
  const auto uz = vertical_components(g, ph);
  for (int i = 0; i < r.size(); ++i)
    for (int m = 0; m < ph.size(); ++m) {
      // Cartesian conversion: e_r = (cos, sin), e_phi = (-sin, cos)
      const auto v = full.velocity(a, r[i], ph[m]);
      const double z = v.vr * std::sin(ph[m]) + v.vphi * std::cos(ph[m]);
      CHECK(std::abs(uz(i, m) - z) < 1e-14 * (1 + std::abs(z)) + 1e-14);
      CHECK(std::abs(uz(i, m) - v.uz) < 1e-13 * (1 + std::abs(z)));
    }
}

TEST_CASE("steady solutions") {
  const Resolution res{6, 16};
  SUBCASE("symmetric, divergence-free, with exact wall values") {
    const auto p = geometry(1.0, 1.0, 50.0);
    const auto b = steady_solve(p, res);
    CHECK(b.residual < 1e-10);
    CHECK(b.picard_iters >= 1);
    const auto f = b.field(17);
    CHECK(symmetry_residual(f) < 1e-10);
    for (int k = 0; k <= f.k_max(); ++k)
      for (int wall : {0, 16}) {
        CHECK(std::abs(f.vr_cos(k, wall)) + std::abs(f.vr_sin(k, wall)) < 1e-13);
        CHECK(std::abs(f.vphi_cos(k, wall)) + std::abs(f.vphi_sin(k, wall)) < 1e-12);
        CHECK(std::abs(f.tau_cos(k, wall)) + std::abs(f.tau_sin(k, wall)) < 1e-14);
      }
    const auto space = b.space();
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> ur(p.ri, p.ro), up(0, 2 * pi);
    for (int i = 0; i < 20; ++i) {
      const double r = ur(rng), phi = up(rng);
      const auto v = space.velocity(b.stream, r, phi);
      CHECK(std::abs(v.dvr_dr + v.vr / r + v.dvphi_dphi / r) < 1e-12);
    }
    // the flow is driven: conduction is not a solution
    CHECK(b.grad_v_norm > 0.1);
  }

  SUBCASE("small-Ra limit is the Stokes flow forced by sin(phi) e_r / B") {
    const auto p0 = geometry(1.0, 1.0, 1.0);
    const PolarSpace space(p0.ri, res, Family::Even);
    const Eigen::VectorXd stokes = space.velocity_stiffness().ldlt().solve(buoyancy_forcing(space, p0));
    double prev = 1e300;
    for (double ra : {1e-1, 1e-2, 1e-3}) {
      const auto b = steady_solve(geometry(1.0, 1.0, ra), res);
      const double diff = (b.stream / ra - stokes).norm() / stokes.norm();
      CHECK(diff < prev / 5);
      prev = diff;
    }
    CHECK(prev < 1e-5);
    const auto tiny = steady_solve(geometry(1.0, 1.0, 1e-6), res);
    CHECK(tiny.grad_v_norm < 1e-6);
  }

  SUBCASE("discrete steady system is reflection-equivariant") {
    const auto p = geometry(1.5, 0.7, 200.0);
    const PolarSpace full(p.ri, res, Family::Full);
    std::mt19937 rng(4);
    for (int trial = 0; trial < 3; ++trial) {
      const Eigen::VectorXd a = smooth_random(full.stream_modes(), rng), c = smooth_random(full.scalar_modes(), rng);
      const Eigen::VectorXd r = steady_residual_vector(full, p, a, c);
      const Eigen::VectorXd rr = steady_residual_vector(full, p, reflect_stream(full, a), reflect_scalar(full, c));
      Eigen::VectorXd expect(r.size());
      expect << reflect_stream(full, r.head(full.n_stream())), reflect_scalar(full, r.tail(full.n_scalar()));
      CHECK((rr - expect).cwiseAbs().maxCoeff() < 1e-11 * (1 + r.cwiseAbs().maxCoeff()));
    }
    // the even solution also solves the unrestricted system
    const auto b = steady_solve(p, res);
    const PolarSpace even = b.space();
    const Eigen::VectorXd a = embed_stream(even, full, b.stream), c = embed_scalar(even, full, b.temperature);
    CHECK(steady_residual(full, p, a, c) < 1e-10);
    CHECK(steady_residual(full, p, reflect_stream(full, a), reflect_scalar(full, c)) < 1e-10);
  }

  SUBCASE("iteration budget exhausted") {
    SteadyOptions opt;
    opt.max_iters = 1;
    CHECK_THROWS_AS(steady_solve(geometry(1.0, 1.0, 500.0), res, opt), DivergenceError);
  }
}

TEST_CASE("gradient of the base flow scales linearly in Ra at fixed geometry") {
  const Resolution res{8, 32};
  double lo = 1e300, hi = 0;
  for (double ra : {1.0, 10.0, 100.0}) {
    const auto p = geometry(1.0, 1.0, ra);
    const auto b = steady_solve(p, res);
    CHECK(b.residual < 1e-10);
    CHECK(symmetry_residual(b.field(33)) < 1e-10);
    const double scaled = b.grad_v_norm * p.b / ra;
    lo = std::min(lo, scaled);
    hi = std::max(hi, scaled);
  }
  CHECK(hi / lo < 2.0);
}
