#include "convec/stability_variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace convec::stability {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::MatrixXd blockdiag(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

Eigen::MatrixXd sym(const Eigen::MatrixXd& a) { return 0.5 * (a + a.transpose()); }

// Largest |value| of (v^r, v^phi, tau) over the nodes and an angular grid.
double field_scale(const annulus::PolarField& f) {
  const int np = 4 * f.k_max() + 8;
  double s = 0;
  for (int i = 0; i < f.n_nodes(); ++i)
    for (int m = 0; m < np; ++m) s = std::max(s, f.at(i, 2 * std::numbers::pi * m / np).cwiseAbs().maxCoeff());
  return s;
}

}  // namespace

std::string to_string(SymmetryLabel s) {
  switch (s) {
    case SymmetryLabel::Even:
      return "even";
    case SymmetryLabel::Odd:
      return "odd";
    default:
      return "mixed";
  }
}

StabilityProblem::StabilityProblem(const BaseState& base, Family family)
    : params_(base.params), space_(base.params.ri, base.res, family) {
  params_.validate();
  const auto& p = params_;
  const PolarSpace bs = base.space();
  if (base.stream.size() != bs.n_stream() || base.temperature.size() != bs.n_scalar())
    throw InvalidArgument("base state does not match its resolution");

  // base fields at the shared quadrature nodes
  const auto& bv = bs.vt();
  const auto& bt = bs.st();
  const Eigen::VectorXd v0r = bv.vr * base.stream, v0p = bv.vphi * base.stream;
  const Eigen::VectorXd dxr = bv.dux_dr * base.stream, dxp = bv.dux_dphi * base.stream;
  const Eigen::VectorXd dzr = bv.duz_dr * base.stream, dzp = bv.duz_dphi * base.stream;
  const Eigen::VectorXd t0r = bt.dr * base.temperature, t0p = bt.dphi * base.temperature;

  const auto W = space_.qw().asDiagonal();
  const auto& v = space_.vt();
  const auto& t = space_.st();
  const Eigen::VectorXd inv_rb = (space_.qr().array() * p.b).inverse();

  // (phi_j . grad) v0 and (v0 . grad) phi_j, Cartesian components
  const Eigen::MatrixXd px = dxr.asDiagonal() * v.vr + dxp.asDiagonal() * v.vphi;
  const Eigen::MatrixXd pz = dzr.asDiagonal() * v.vr + dzp.asDiagonal() * v.vphi;
  const Eigen::MatrixXd strain = v.ux.transpose() * W * px + v.uz.transpose() * W * pz;
  const Eigen::MatrixXd ax = v0r.asDiagonal() * v.dux_dr + v0p.asDiagonal() * v.dux_dphi;
  const Eigen::MatrixXd az = v0r.asDiagonal() * v.duz_dr + v0p.asDiagonal() * v.duz_dphi;
  const Eigen::MatrixXd transport = v.ux.transpose() * W * ax + v.uz.transpose() * W * az;
  const Eigen::MatrixXd heat_transport =
      t.f.transpose() * W * (v0r.asDiagonal() * t.dr + v0p.asDiagonal() * t.dphi);

  // <u^r/(rB) - u . grad tau0, theta> and <u^z, theta>
  const Eigen::MatrixXd source =
      t.f.transpose() * W * (inv_rb.asDiagonal() * v.vr - t0r.asDiagonal() * v.vr - t0p.asDiagonal() * v.vphi);
  const Eigen::MatrixXd lift = t.f.transpose() * W * v.uz;
  const Eigen::MatrixXd coupling = lift + source;

  const int nu = space_.n_stream(), nt = space_.n_scalar();
  const double sr = std::sqrt(p.ra);
  const Eigen::MatrixXd& gu = space_.velocity_stiffness();
  const Eigen::MatrixXd& gt = space_.scalar_stiffness();

  g_ = blockdiag(gu, gt);
  n_ = Eigen::MatrixXd::Zero(nu + nt, nu + nt);
  n_.topLeftCorner(nu, nu) = -sym(strain) / p.pr;
  n_.bottomLeftCorner(nt, nu) = 0.5 * sr * coupling;
  n_.topRightCorner(nu, nt) = 0.5 * sr * coupling.transpose();

  m_ = blockdiag(space_.velocity_mass() / p.pr, space_.scalar_mass());
  l_ = Eigen::MatrixXd::Zero(nu + nt, nu + nt);
  l_.topLeftCorner(nu, nu) = -gu - (strain + transport) / p.pr;
  l_.topRightCorner(nu, nt) = sr * lift.transpose();
  l_.bottomLeftCorner(nt, nu) = sr * source;
  l_.bottomRightCorner(nt, nt) = -gt - heat_transport;

  pa_ = blockdiag(gu + sym(strain) / p.pr, gt);
  pb_ = Eigen::MatrixXd::Zero(nu + nt, nu + nt);
  pb_.bottomLeftCorner(nt, nu) = coupling;
  pb_.topRightCorner(nu, nt) = coupling.transpose();
}

double StabilityProblem::production_value(const Eigen::VectorXd& x) const {
  if (x.size() != size()) throw InvalidArgument("state vector has the wrong size");
  return x.dot(n_ * x);
}

double StabilityProblem::dissipation_value(const Eigen::VectorXd& x) const {
  if (x.size() != size()) throw InvalidArgument("state vector has the wrong size");
  return x.dot(g_ * x);
}

double StabilityProblem::functional(const Eigen::VectorXd& x) const {
  const double d = dissipation_value(x);
  if (!(d > 0)) throw InvalidArgument("the functional is undefined for the zero perturbation");
  return production_value(x) / d;
}

double StabilityProblem::energy_rate(const Eigen::VectorXd& x) const {
  if (x.size() != size()) throw InvalidArgument("state vector has the wrong size");
  return x.dot(m_ * (m_.ldlt().solve(l_ * x)));
}

SymmetryLabel classify(const PolarSpace& full, const Eigen::VectorXd& x, double tol) {
  const int nu = full.n_stream();
  if (x.size() != nu + full.n_scalar()) throw InvalidArgument("state vector does not match the space");
  const auto f = annulus::to_polar_field(full, x.head(nu), x.tail(full.n_scalar()),
                                         annulus::lobatto_nodes(full.r_inner(), full.resolution().n_r + 1));
  const double scale = field_scale(f);
  if (!(scale > 0)) return SymmetryLabel::Mixed;
  if (annulus::symmetry_residual(f) / scale < tol) return SymmetryLabel::Even;
  if (annulus::antisymmetry_residual(f) / scale < tol) return SymmetryLabel::Odd;
  return SymmetryLabel::Mixed;
}

EigenSolution solve_eig(const BaseState& base, int count, bool split) {
  if (count < 1) throw InvalidArgument("count must be >= 1");
  const PolarSpace full(base.params.ri, base.res, Family::Full, false);
  struct Candidate {
    double lambda;
    Eigen::VectorXd x;
  };
  std::vector<Candidate> found;
  EigenSolution out;
  const std::vector<Family> families = split ? std::vector<Family>{Family::Even, Family::Odd}
                                             : std::vector<Family>{Family::Full};
  for (Family fam : families) {
    const StabilityProblem prob(base, fam);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(prob.production(), prob.dissipation());
    if (es.info() != Eigen::Success) throw ResolutionError("dissipation form is not positive definite");
    const int nu = prob.n_stream();
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
      const double mu = es.eigenvalues()[i];
      out.production_ratios.push_back(mu);
      if (mu <= 0) continue;
      const Eigen::VectorXd& x = es.eigenvectors().col(i);
      Eigen::VectorXd xf(full.n_stream() + full.n_scalar());
      xf << annulus::embed_stream(prob.space(), full, x.head(nu)),
          annulus::embed_scalar(prob.space(), full, x.tail(prob.size() - nu));
      found.push_back({2.0 / mu, xf});
    }
  }
  std::sort(out.production_ratios.begin(), out.production_ratios.end());
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
  out.lambda_c = found.empty() ? kInf : found.front().lambda;
  for (int i = 0; i < std::min<int>(count, static_cast<int>(found.size())); ++i) {
    out.lambdas.push_back(found[i].lambda);
    out.vectors.push_back(found[i].x);
    out.labels.push_back(classify(full, found[i].x));
  }
  return out;
}

double pencil_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::VectorXd& x, double lambda) {
  const Eigen::VectorXd ax = a * x, bx = b * x;
  const double den = ax.norm() + std::abs(lambda) * bx.norm();
  return den > 0 ? (ax - lambda * bx).norm() / den : 0.0;
}

MaximizerResult maximize_quotient(const Eigen::MatrixXd& n, const Eigen::MatrixXd& g, int block, double tol,
                                  int max_iters) {
  const int dim = static_cast<int>(g.rows());
  if (n.rows() != dim || n.cols() != dim || g.cols() != dim) throw InvalidArgument("forms differ in size");
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success) throw ResolutionError("dissipation form is not positive definite");
  // C = L^-1 N L^-T
  const Eigen::MatrixXd y = llt.matrixL().solve(n);
  Eigen::MatrixXd c = llt.matrixL().solve(y.transpose());
  c = sym(c);

  const int p = std::max(1, std::min(block, dim));
  std::mt19937 rng(20240611);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd X(dim, p);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < p; ++j) X(i, j) = gauss(rng);
  X = Eigen::HouseholderQR<Eigen::MatrixXd>(X).householderQ() * Eigen::MatrixXd::Identity(dim, p);
  Eigen::MatrixXd P(dim, 0);

  // orthonormal basis of the columns of S, dropping near-dependent ones
  auto orthonormalize = [](const Eigen::MatrixXd& S) {
    Eigen::MatrixXd Q(S.rows(), 0);
    for (int j = 0; j < S.cols(); ++j) {
      Eigen::VectorXd v = S.col(j);
      const double n0 = v.norm();
      if (!(n0 > 0)) continue;
      for (int pass = 0; pass < 2; ++pass) v -= Q * (Q.transpose() * v);
      if (v.norm() < 1e-10 * n0) continue;
      Q.conservativeResize(Eigen::NoChange, Q.cols() + 1);
      Q.col(Q.cols() - 1) = v.normalized();
    }
    return Q;
  };
  auto top_ritz = [&](const Eigen::MatrixXd& S, int k) {
    const Eigen::MatrixXd H = sym(S.transpose() * c * S);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    // descending order
    const int m = static_cast<int>(H.rows());
    Eigen::MatrixXd Y(m, k);
    Eigen::VectorXd th(k);
    for (int j = 0; j < k; ++j) {
      Y.col(j) = es.eigenvectors().col(m - 1 - j);
      th[j] = es.eigenvalues()[m - 1 - j];
    }
    return std::pair{Y, th};
  };

  MaximizerResult out;
  const double cnorm = std::max(c.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  auto [Y0, theta] = top_ritz(X, p);
  X = X * Y0;
  for (int it = 0; it <= max_iters; ++it) {
    const Eigen::MatrixXd CX = c * X;
    const Eigen::MatrixXd R = CX - X * theta.asDiagonal();
    out.residual = R.col(0).norm() / std::max(std::abs(theta[0]), cnorm * 1e-300 + 1e-300);
    out.iterations = it;
    if (R.col(0).norm() <= tol * std::max(std::abs(theta[0]), 1e-14 * cnorm)) break;
    if (it == max_iters) throw DivergenceError("quotient maximization did not converge");
    Eigen::MatrixXd S(dim, X.cols() + R.cols() + P.cols());
    S << X, R, P;
    const Eigen::MatrixXd Q = orthonormalize(S);
    auto [Y, th] = top_ritz(Q, p);
    const Eigen::MatrixXd Xn = Q * Y;
    P = Xn - X * (X.transpose() * Xn);
    X = Xn;
    theta = th;
  }
  out.value = theta[0];
  out.x = llt.matrixU().solve(X.col(0));
  out.x /= std::sqrt(out.x.dot(g * out.x));
  return out;
}

StabilityReport maximize_F(const BaseState& base, int count, double rel_tol) {
  const StabilityProblem full(base, Family::Full);
  const auto direct = maximize_quotient(full.production(), full.dissipation());
  const auto eig = solve_eig(base, count, true);

  StabilityReport rep;
  rep.M = direct.value;
  rep.M_eig = eig.production_ratios.empty() ? 0.0 : eig.production_ratios.back();
  rep.lambda_c = eig.lambda_c;
  rep.iterations = direct.iterations;
  rep.lambdas = eig.lambdas;
  rep.labels = eig.labels;
  const double scale = std::max(std::abs(rep.M_eig), 1e-12);
  if (std::abs(rep.M - rep.M_eig) > rel_tol * scale)
    throw NormalizationMismatch("direct maximization and the eigenvalue route disagree on M", rep.M, rep.M_eig);
  rep.energy_stable = rep.M <= 1.0;
  rep.most_dangerous = direct.x;
  rep.normalization = direct.x.dot(full.dissipation() * direct.x);
  if (std::isfinite(rep.lambda_c))
    rep.el_residual = pencil_residual(full.dissipation(), 0.5 * full.production(), direct.x, rep.lambda_c);
  else
    rep.el_residual = pencil_residual(full.production(), full.dissipation(), direct.x, rep.M);
  rep.label = classify(full.space(), direct.x);

  Eigen::LLT<Eigen::MatrixXd> llt(full.coupling_lhs());
  rep.lambda_coupling = kInf;
  if (llt.info() == Eigen::Success) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(full.coupling_rhs(), full.coupling_lhs());
    const double nu_max = es.eigenvalues().maxCoeff();
    if (nu_max > 0) rep.lambda_coupling = 1.0 / nu_max;
  } else {
    rep.lambda_coupling = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

SlopeReport energy_slope(const StabilityProblem& prob, const Eigen::VectorXd& x0, double dt) {
  if (x0.size() != prob.size()) throw InvalidArgument("state vector has the wrong size");
  if (!(dt > 0)) throw InvalidArgument("dt must be positive");
  const auto& M = prob.mass();
  const auto& L = prob.linear();
  auto energy = [&](const Eigen::VectorXd& x) { return 0.5 * x.dot(M * x); };
  auto cn_step = [&](double h) {
    const Eigen::MatrixXd lhs = M - 0.5 * h * L;
    return Eigen::VectorXd(lhs.partialPivLu().solve((M + 0.5 * h * L) * x0));
  };
  SlopeReport rep;
  const double e0 = energy(x0);
  const double d = prob.dissipation_value(x0);
  if (d == 0) return rep;
  const double s1 = (energy(cn_step(dt)) - e0) / dt;
  const double s2 = (energy(cn_step(0.5 * dt)) - e0) / (0.5 * dt);
  rep.slope = 2 * s2 - s1;
  rep.functional = prob.functional(x0);
  rep.identity = (rep.functional - 1.0) * d;
  return rep;
}

SlopeReport most_dangerous_experiment(const StabilityProblem& full, const StabilityReport& report) {
  if (full.family() != Family::Full) throw InvalidArgument("the experiment runs on the unrestricted family");
  if (!(report.M > 1.0)) throw InvalidArgument("the growth experiment needs M > 1");
  const auto rep = energy_slope(full, report.most_dangerous);
  if (!(rep.slope > 0)) throw CheckFailure("energy of the most dangerous perturbation does not grow initially");
  return rep;
}

// ---- planar-layer limit ----

namespace {

}  // namespace

LayerPencil layer_pencil(int n_r, double a) {
  if (n_r < 2) throw InvalidArgument("n_r must be >= 2");
  if (!(a > 0)) throw InvalidArgument("horizontal wavenumber must be positive");
  const auto [s, w] = annulus::gauss_legendre(n_r + 8, -1.0, 1.0);
  LayerPencil f;
  const int n = 2 * n_r;
  f.g = Eigen::MatrixXd::Zero(n, n);
  f.c = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd psi(s.size(), n_r), lap(s.size(), n_r), th(s.size(), n_r), thz(s.size(), n_r);
  for (int q = 0; q < s.size(); ++q) {
    const auto t = annulus::legendre(n_r + 4, s[q]);
    for (int j = 0; j < n_r; ++j) {
      const auto cj = annulus::clamped_function(t, j);
      const auto dj = annulus::dirichlet_function(t, j);
      psi(q, j) = cj.f;
      lap(q, j) = 4.0 * cj.d2 - a * a * cj.f;
      th(q, j) = dj.f;
      thz(q, j) = 2.0 * dj.d1;
    }
  }
  // dz = ds / 2
  const Eigen::VectorXd wz = 0.5 * w;
  const auto W = wz.asDiagonal();
  f.g.topLeftCorner(n_r, n_r) = lap.transpose() * W * lap;
  f.g.bottomRightCorner(n_r, n_r) = thz.transpose() * W * thz + a * a * th.transpose() * W * th;
  const Eigen::MatrixXd cp = a * th.transpose() * W * psi;
  f.c.bottomLeftCorner(n_r, n_r) = cp;
  f.c.topRightCorner(n_r, n_r) = cp.transpose();
  f.g = sym(f.g);
  return f;
}

namespace {

SymmetryLabel layer_parity(const Eigen::VectorXd& stream, const Eigen::VectorXd& temperature) {
  const int n_r = static_cast<int>(stream.size());
  double scale = 0, even = 0, odd = 0;
  for (int i = 0; i <= 40; ++i) {
    const double s = -1.0 + i / 20.0;
    const auto tp = annulus::legendre(n_r + 4, s), tm = annulus::legendre(n_r + 4, -s);
    double ps = 0, pm = 0, ts = 0, tm_ = 0;
    for (int j = 0; j < n_r; ++j) {
      ps += stream[j] * annulus::clamped_function(tp, j).f;
      pm += stream[j] * annulus::clamped_function(tm, j).f;
      ts += temperature[j] * annulus::dirichlet_function(tp, j).f;
      tm_ += temperature[j] * annulus::dirichlet_function(tm, j).f;
    }
    scale = std::max({scale, std::abs(ps), std::abs(ts)});
    even = std::max(even, std::abs(ps - pm) + std::abs(ts - tm_));
    odd = std::max(odd, std::abs(ps + pm) + std::abs(ts + tm_));
  }
  if (!(scale > 0)) return SymmetryLabel::Mixed;
  if (even / scale < 1e-8) return SymmetryLabel::Even;
  if (odd / scale < 1e-8) return SymmetryLabel::Odd;
  return SymmetryLabel::Mixed;
}

}  // namespace

LayerSolution solve_eig0_at(int n_r, double wavenumber) {
  const auto f = layer_pencil(n_r, wavenumber);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(f.c, f.g);
  if (es.info() != Eigen::Success) throw ResolutionError("singular dissipation form in the layer problem");
  const Eigen::VectorXd& mu = es.eigenvalues();
  LayerSolution out;
  out.n_r = n_r;
  out.wavenumber = wavenumber;
  out.spectrum.resize(mu.size());
  const double tiny = 1e-14 * mu.cwiseAbs().maxCoeff();
  for (int i = 0; i < mu.size(); ++i) out.spectrum[i] = std::abs(mu[i]) > tiny ? 1.0 / mu[i] : (mu[i] >= 0 ? kInf : -kInf);
  std::sort(out.spectrum.data(), out.spectrum.data() + out.spectrum.size());
  const int top = static_cast<int>(mu.size()) - 1;
  if (!(mu[top] > tiny)) throw ResolutionError("no positive eigenvalue in the layer problem");
  out.lambda_c = 1.0 / mu[top];
  const Eigen::VectorXd x = es.eigenvectors().col(top);
  out.stream = x.head(n_r);
  out.temperature = x.tail(n_r);
  out.label = layer_parity(out.stream, out.temperature);
  return out;
}

LayerSolution solve_eig0(int n_r, double a_min, double a_max, int grid) {
  if (!(a_min > 0) || !(a_max > a_min)) throw InvalidArgument("need 0 < a_min < a_max");
  if (grid < 3) throw InvalidArgument("wavenumber grid needs at least 3 points");
  auto lam = [&](double a) { return solve_eig0_at(n_r, a).lambda_c; };
  int best = 0;
  double best_val = kInf;
  for (int i = 0; i < grid; ++i) {
    const double a = a_min + (a_max - a_min) * i / (grid - 1);
    const double v = lam(a);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  const double h = (a_max - a_min) / (grid - 1);
  double lo = std::max(a_min, a_min + (best - 1) * h), hi = std::min(a_max, a_min + (best + 1) * h);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = lam(x1), f2 = lam(x2);
  while (hi - lo > 1e-9) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = lam(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = lam(x2);
    }
  }
  return solve_eig0_at(n_r, 0.5 * (lo + hi));
}

}  // namespace convec::stability
