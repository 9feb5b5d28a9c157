#include "convec/polar_space.hpp"

#include <cmath>
#include <numbers>

namespace convec::annulus {

namespace {

constexpr double kPi = std::numbers::pi;

double to_s(double ri, double r) { return 2.0 * (r - ri) - 1.0; }

// Angular factor of a Fourier component and its first two derivatives.
struct Angular {
  double f, d1, d2;
};

Angular angular(int k, int parity, double phi) {
  const double c = std::cos(k * phi), s = std::sin(k * phi);
  if (parity == 1) return {c, -k * s, -double(k * k) * c};
  return {s, k * c, -double(k * k) * s};
}

VelocityJet finish_velocity(double r, double phi, VelocityJet v, double dvr_dphi, double dvphi_dr) {
  const double c = std::cos(phi), s = std::sin(phi);
  v.ux = v.vr * c - v.vphi * s;
  v.uz = v.vr * s + v.vphi * c;
  v.dux_dr = v.dvr_dr * c - dvphi_dr * s;
  v.duz_dr = v.dvr_dr * s + dvphi_dr * c;
  v.dux_dphi = (dvr_dphi * c - v.vr * s - v.dvphi_dphi * s - v.vphi * c) / r;
  v.duz_dphi = (dvr_dphi * s + v.vr * c + v.dvphi_dphi * c - v.vphi * s) / r;
  return v;
}

VelocityJet stream_jet(const Mode& m, const LegendreTable& t, double r, double phi) {
  VelocityJet v;
  if (m.k == 0) {
    // azimuthal mean flow, parametrized by v^phi itself
    const auto g = dirichlet_function(t, m.j);
    v.vphi = g.f;
    return finish_velocity(r, phi, v, 0.0, 2.0 * g.d1);
  }
  const auto f = clamped_function(t, m.j);
  const double fr = 2.0 * f.d1, frr = 4.0 * f.d2;
  const auto a = angular(m.k, m.parity, phi);
  // v^r = psi_phi / r, v^phi = -psi_r
  v.vr = f.f * a.d1 / r;
  v.vphi = -fr * a.f;
  v.dvr_dr = (fr / r - f.f / (r * r)) * a.d1;
  v.dvphi_dphi = -fr * a.d1;
  return finish_velocity(r, phi, v, f.f * a.d2 / r, -frr * a.f);
}

ScalarJet scalar_jet(const Mode& m, const LegendreTable& t, double r, double phi) {
  const auto h = dirichlet_function(t, m.j);
  const auto a = angular(m.k, m.parity, phi);
  return {h.f * a.f, 2.0 * h.d1 * a.f, h.f * a.d1 / r};
}

bool stream_in_family(int k, int parity, Family fam) {
  if (fam == Family::Full) return true;
  // psi odd under the reflection <=> velocity even
  const bool psi_odd = parity == 1 ? (k % 2 == 1) : (k % 2 == 0);
  return (fam == Family::Even) == psi_odd;
}

bool scalar_in_family(int k, int parity, Family fam) {
  if (fam == Family::Full) return true;
  const bool even = parity == 1 ? (k % 2 == 0) : (k % 2 == 1);
  return (fam == Family::Even) == even;
}

// Sign picked up by a coefficient under phi -> pi - phi.
double stream_reflection_sign(const Mode& m) {
  if (m.k == 0) return -1.0;
  // psi -> -psi(pi - phi)
  const double s = (m.k % 2 == 0) ? 1.0 : -1.0;
  return m.parity == 1 ? -s : s;
}

double scalar_reflection_sign(const Mode& m) {
  const double s = (m.k % 2 == 0) ? 1.0 : -1.0;
  return m.parity == 1 ? s : -s;
}

}  // namespace

void Resolution::validate() const {
  if (k_max < 1) throw InvalidArgument("k_max must be >= 1");
  if (n_r < 2) throw InvalidArgument("n_r must be >= 2");
  if (nq_r != 0 && nq_r < n_r + 4) throw ResolutionError("radial quadrature too coarse for the basis");
  if (n_phi != 0 && n_phi <= 3 * k_max + 2) throw ResolutionError("angular quadrature too coarse for triple products");
}

LegendreTable legendre(int n, double s) {
  LegendreTable t{Eigen::VectorXd::Zero(n + 1), Eigen::VectorXd::Zero(n + 1), Eigen::VectorXd::Zero(n + 1)};
  t.p[0] = 1.0;
  if (n == 0) return t;
  t.p[1] = s;
  t.d1[1] = 1.0;
  for (int k = 1; k < n; ++k) {
    t.p[k + 1] = ((2 * k + 1) * s * t.p[k] - k * t.p[k - 1]) / (k + 1);
    t.d1[k + 1] = ((2 * k + 1) * (t.p[k] + s * t.d1[k]) - k * t.d1[k - 1]) / (k + 1);
    t.d2[k + 1] = ((2 * k + 1) * (2 * t.d1[k] + s * t.d2[k]) - k * t.d2[k - 1]) / (k + 1);
  }
  return t;
}

RadialJet dirichlet_function(const LegendreTable& t, int j) {
  const double scale = 1.0 / std::sqrt(4.0 * j + 6.0);
  return {scale * (t.p[j] - t.p[j + 2]), scale * (t.d1[j] - t.d1[j + 2]), scale * (t.d2[j] - t.d2[j + 2])};
}

RadialJet clamped_function(const LegendreTable& t, int j) {
  const double b = -2.0 * (2 * j + 5) / (2 * j + 7.0), c = (2 * j + 3) / (2 * j + 7.0);
  const double scale = 1.0 / (2 * j + 3.0);
  return {scale * (t.p[j] + b * t.p[j + 2] + c * t.p[j + 4]), scale * (t.d1[j] + b * t.d1[j + 2] + c * t.d1[j + 4]),
          scale * (t.d2[j] + b * t.d2[j + 2] + c * t.d2[j + 4])};
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int n, double a, double b) {
  if (n < 1) throw InvalidArgument("quadrature needs at least one node");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) J(i, i - 1) = J(i - 1, i) = i / std::sqrt(4.0 * i * i - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  Eigen::VectorXd x = es.eigenvalues();
  Eigen::VectorXd w = 2.0 * es.eigenvectors().row(0).transpose().array().square();
  x = (0.5 * (b - a)) * (x.array() + 1.0) + a;
  w *= 0.5 * (b - a);
  return {x, w};
}

PolarSpace::PolarSpace(double r_inner, Resolution res, Family family, bool with_tables)
    : ri_(r_inner), res_(res), family_(family) {
  if (!(r_inner > 0)) throw InvalidArgument("inner radius must be positive");
  res_.validate();
  const int K = res_.k_max, N = res_.n_r;
  for (int k = 0; k <= K; ++k)
    for (int parity : {1, -1}) {
      if (k == 0 && parity == -1) continue;
      if (stream_in_family(k, parity, family))
        for (int j = 0; j < N; ++j) stream_modes_.push_back({k, parity, j});
      if (scalar_in_family(k, parity, family))
        for (int j = 0; j < N; ++j) scalar_modes_.push_back({k, parity, j});
    }
  if (!with_tables) return;

  const int nr = res_.radial_nodes(), np = res_.angular_nodes();
  const auto [xr, wr] = gauss_legendre(nr, ri_, ri_ + 1.0);
  const int nq = nr * np;
  qr_.resize(nq);
  qphi_.resize(nq);
  qw_.resize(nq);
  for (int m = 0; m < np; ++m)
    for (int i = 0; i < nr; ++i) {
      const int q = m * nr + i;
      qr_[q] = xr[i];
      qphi_[q] = 2 * kPi * m / np;
      qw_[q] = wr[i] * xr[i] * 2 * kPi / np;
    }

  const int ns = n_stream(), nt = n_scalar();
  for (auto* M : {&vt_.vr, &vt_.vphi, &vt_.ux, &vt_.uz, &vt_.dux_dr, &vt_.dux_dphi, &vt_.duz_dr, &vt_.duz_dphi})
    M->resize(nq, ns);
  for (auto* M : {&st_.f, &st_.dr, &st_.dphi}) M->resize(nq, nt);

  std::vector<LegendreTable> tables;
  tables.reserve(nr);
  for (int i = 0; i < nr; ++i) tables.push_back(legendre(N + 4, to_s(ri_, xr[i])));
  for (int q = 0; q < nq; ++q) {
    const auto& t = tables[q % nr];
    for (int b = 0; b < ns; ++b) {
      const auto v = stream_jet(stream_modes_[b], t, qr_[q], qphi_[q]);
      vt_.vr(q, b) = v.vr;
      vt_.vphi(q, b) = v.vphi;
      vt_.ux(q, b) = v.ux;
      vt_.uz(q, b) = v.uz;
      vt_.dux_dr(q, b) = v.dux_dr;
      vt_.dux_dphi(q, b) = v.dux_dphi;
      vt_.duz_dr(q, b) = v.duz_dr;
      vt_.duz_dphi(q, b) = v.duz_dphi;
    }
    for (int b = 0; b < nt; ++b) {
      const auto s = scalar_jet(scalar_modes_[b], t, qr_[q], qphi_[q]);
      st_.f(q, b) = s.f;
      st_.dr(q, b) = s.dr;
      st_.dphi(q, b) = s.dphi;
    }
  }

  const auto W = qw_.asDiagonal();
  auto gram = [&](std::initializer_list<const Eigen::MatrixXd*> parts) {
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(parts.begin()[0]->cols(), parts.begin()[0]->cols());
    for (const auto* P : parts) G.noalias() += P->transpose() * W * *P;
    return Eigen::MatrixXd(0.5 * (G + G.transpose()));
  };
  gu_ = gram({&vt_.dux_dr, &vt_.dux_dphi, &vt_.duz_dr, &vt_.duz_dphi});
  gt_ = gram({&st_.dr, &st_.dphi});
  mu_ = gram({&vt_.ux, &vt_.uz});
  mt_ = gram({&st_.f});
}

VelocityJet PolarSpace::stream_basis(int i, double r, double phi) const {
  if (r < ri_ - 1e-14 || r > ri_ + 1.0 + 1e-14) throw InvalidArgument("r outside the annulus");
  return stream_jet(stream_modes_.at(i), legendre(res_.n_r + 4, to_s(ri_, r)), r, phi);
}

ScalarJet PolarSpace::scalar_basis(int i, double r, double phi) const {
  if (r < ri_ - 1e-14 || r > ri_ + 1.0 + 1e-14) throw InvalidArgument("r outside the annulus");
  return scalar_jet(scalar_modes_.at(i), legendre(res_.n_r + 4, to_s(ri_, r)), r, phi);
}

VelocityJet PolarSpace::velocity(const Eigen::VectorXd& a, double r, double phi) const {
  if (a.size() != n_stream()) throw InvalidArgument("stream coefficient vector has the wrong size");
  if (r < ri_ - 1e-14 || r > ri_ + 1.0 + 1e-14) throw InvalidArgument("r outside the annulus");
  const auto t = legendre(res_.n_r + 4, to_s(ri_, r));
  VelocityJet out;
  for (int b = 0; b < n_stream(); ++b) {
    if (a[b] == 0) continue;
    const auto v = stream_jet(stream_modes_[b], t, r, phi);
    out.vr += a[b] * v.vr;
    out.vphi += a[b] * v.vphi;
    out.ux += a[b] * v.ux;
    out.uz += a[b] * v.uz;
    out.dux_dr += a[b] * v.dux_dr;
    out.dux_dphi += a[b] * v.dux_dphi;
    out.duz_dr += a[b] * v.duz_dr;
    out.duz_dphi += a[b] * v.duz_dphi;
    out.dvr_dr += a[b] * v.dvr_dr;
    out.dvphi_dphi += a[b] * v.dvphi_dphi;
  }
  return out;
}

ScalarJet PolarSpace::scalar(const Eigen::VectorXd& c, double r, double phi) const {
  if (c.size() != n_scalar()) throw InvalidArgument("scalar coefficient vector has the wrong size");
  if (r < ri_ - 1e-14 || r > ri_ + 1.0 + 1e-14) throw InvalidArgument("r outside the annulus");
  const auto t = legendre(res_.n_r + 4, to_s(ri_, r));
  ScalarJet out;
  for (int b = 0; b < n_scalar(); ++b) {
    if (c[b] == 0) continue;
    const auto s = scalar_jet(scalar_modes_[b], t, r, phi);
    out.f += c[b] * s.f;
    out.dr += c[b] * s.dr;
    out.dphi += c[b] * s.dphi;
  }
  return out;
}

int find_mode(const std::vector<Mode>& modes, const Mode& m) {
  for (std::size_t i = 0; i < modes.size(); ++i)
    if (modes[i].k == m.k && modes[i].parity == m.parity && modes[i].j == m.j) return static_cast<int>(i);
  return -1;
}

namespace {

Eigen::VectorXd embed(const std::vector<Mode>& from, const std::vector<Mode>& to, const Eigen::VectorXd& x) {
  if (x.size() != static_cast<Eigen::Index>(from.size())) throw InvalidArgument("coefficient vector has the wrong size");
  Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(to.size()));
  for (std::size_t i = 0; i < from.size(); ++i) {
    const int t = find_mode(to, from[i]);
    if (t < 0) {
      if (x[i] != 0) throw InvalidArgument("state has components outside the target space");
      continue;
    }
    y[t] = x[i];
  }
  return y;
}

void require_same_grid(const PolarSpace& a, const PolarSpace& b) {
  if (a.r_inner() != b.r_inner() || a.resolution().n_r != b.resolution().n_r)
    throw InvalidArgument("spaces differ in geometry or radial resolution");
}

}  // namespace

Eigen::VectorXd embed_stream(const PolarSpace& from, const PolarSpace& to, const Eigen::VectorXd& a) {
  require_same_grid(from, to);
  return embed(from.stream_modes(), to.stream_modes(), a);
}

Eigen::VectorXd embed_scalar(const PolarSpace& from, const PolarSpace& to, const Eigen::VectorXd& c) {
  require_same_grid(from, to);
  return embed(from.scalar_modes(), to.scalar_modes(), c);
}

Eigen::VectorXd reflect_stream(const PolarSpace& space, const Eigen::VectorXd& a) {
  if (a.size() != space.n_stream()) throw InvalidArgument("stream coefficient vector has the wrong size");
  Eigen::VectorXd out(a.size());
  for (int i = 0; i < a.size(); ++i) out[i] = stream_reflection_sign(space.stream_modes()[i]) * a[i];
  return out;
}

Eigen::VectorXd reflect_scalar(const PolarSpace& space, const Eigen::VectorXd& c) {
  if (c.size() != space.n_scalar()) throw InvalidArgument("scalar coefficient vector has the wrong size");
  Eigen::VectorXd out(c.size());
  for (int i = 0; i < c.size(); ++i) out[i] = scalar_reflection_sign(space.scalar_modes()[i]) * c[i];
  return out;
}

PolarField PolarField::zero(int k_max, const Eigen::VectorXd& r_nodes) {
  const Eigen::MatrixXd z = Eigen::MatrixXd::Zero(k_max + 1, r_nodes.size());
  return {r_nodes, z, z, z, z, z, z};
}

Eigen::Vector3d PolarField::at(int i, double phi) const {
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  for (int k = 0; k <= k_max(); ++k) {
    const double c = std::cos(k * phi), s = std::sin(k * phi);
    v[0] += vr_cos(k, i) * c + vr_sin(k, i) * s;
    v[1] += vphi_cos(k, i) * c + vphi_sin(k, i) * s;
    v[2] += tau_cos(k, i) * c + tau_sin(k, i) * s;
  }
  return v;
}

Eigen::VectorXd lobatto_nodes(double r_inner, int n) {
  if (n < 2) throw InvalidArgument("need at least the two wall nodes");
  Eigen::VectorXd r(n);
  for (int i = 0; i < n; ++i) r[i] = r_inner + 0.5 * (1.0 - std::cos(kPi * i / (n - 1)));
  r[0] = r_inner;
  r[n - 1] = r_inner + 1.0;
  return r;
}

PolarField to_polar_field(const PolarSpace& space, const Eigen::VectorXd& a, const Eigen::VectorXd& c,
                          const Eigen::VectorXd& r_nodes) {
  if (a.size() != space.n_stream() || c.size() != space.n_scalar())
    throw InvalidArgument("coefficient vectors do not match the space");
  PolarField f = PolarField::zero(space.resolution().k_max, r_nodes);
  const int n4 = space.resolution().n_r + 4;
  for (int i = 0; i < r_nodes.size(); ++i) {
    const double r = r_nodes[i];
    if (r < space.r_inner() - 1e-14 || r > space.r_outer() + 1e-14) throw InvalidArgument("node outside the annulus");
    const auto t = legendre(n4, to_s(space.r_inner(), r));
    for (int b = 0; b < space.n_stream(); ++b) {
      const auto& m = space.stream_modes()[b];
      if (a[b] == 0) continue;
      if (m.k == 0) {
        f.vphi_cos(0, i) += a[b] * dirichlet_function(t, m.j).f;
        continue;
      }
      const auto g = clamped_function(t, m.j);
      // cos: v^r = -k g/r sin, v^phi = -g' cos; sin: v^r = k g/r cos, v^phi = -g' sin
      if (m.parity == 1) {
        f.vr_sin(m.k, i) += a[b] * (-m.k * g.f / r);
        f.vphi_cos(m.k, i) += a[b] * (-2.0 * g.d1);
      } else {
        f.vr_cos(m.k, i) += a[b] * (m.k * g.f / r);
        f.vphi_sin(m.k, i) += a[b] * (-2.0 * g.d1);
      }
    }
    for (int b = 0; b < space.n_scalar(); ++b) {
      const auto& m = space.scalar_modes()[b];
      if (c[b] == 0) continue;
      const double h = dirichlet_function(t, m.j).f;
      (m.parity == 1 ? f.tau_cos : f.tau_sin)(m.k, i) += c[b] * h;
    }
  }
  return f;
}

namespace {

double reflection_residual(const PolarField& f, int n_phi, double sign) {
  const int np = n_phi > 0 ? n_phi : 4 * f.k_max() + 8;
  double worst = 0;
  for (int i = 0; i < f.n_nodes(); ++i)
    for (int m = 0; m < np; ++m) {
      const double phi = 2 * kPi * m / np;
      const auto a = f.at(i, phi), b = f.at(i, kPi - phi);
      const double res = std::abs(a[0] - sign * b[0]) + std::abs(a[1] + sign * b[1]) + std::abs(a[2] - sign * b[2]);
      worst = std::max(worst, res);
    }
  return worst;
}

}  // namespace

double symmetry_residual(const PolarField& f, int n_phi) { return reflection_residual(f, n_phi, 1.0); }
double antisymmetry_residual(const PolarField& f, int n_phi) { return reflection_residual(f, n_phi, -1.0); }

PolarField symmetrize(const PolarField& f) {
  PolarField g = f;
  for (int k = 0; k <= f.k_max(); ++k) {
    const bool even = k % 2 == 0;
    // v^r and tau keep cos(even k), sin(odd k); v^phi keeps the complement
    if (!even) {
      g.vr_cos.row(k).setZero();
      g.tau_cos.row(k).setZero();
      g.vphi_sin.row(k).setZero();
    } else {
      g.vr_sin.row(k).setZero();
      g.tau_sin.row(k).setZero();
      g.vphi_cos.row(k).setZero();
    }
  }
  return g;
}

Eigen::MatrixXd vertical_components(const PolarField& f, const Eigen::VectorXd& phis) {
  Eigen::MatrixXd uz(f.n_nodes(), phis.size());
  for (int i = 0; i < f.n_nodes(); ++i)
    for (int m = 0; m < phis.size(); ++m) {
      const auto v = f.at(i, phis[m]);
      uz(i, m) = v[0] * std::sin(phis[m]) + v[1] * std::cos(phis[m]);
    }
  return uz;
}

}  // namespace convec::annulus
