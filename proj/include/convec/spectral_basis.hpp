#pragma once

// Trigonometric Galerkin bases on the periodicity cell (0,1)x(0,1) with
// stress-free walls at z = 0 and z = 1.
//
//   pressure-like  : {cos,sin}(2 pi m x) cos(pi n z)
//   stream-like    : {cos,sin}(2 pi m x) sin(pi n z)   (stream function, temperature)
//
// Coefficients live in two dense (m_max+1) x (n_max+1) arrays, one per x-parity.
// Sign convention: d/dx cos(2 pi m x) = -2 pi m sin(2 pi m x).

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <string>

#include "convec/errors.hpp"

namespace convec::spectral {

enum class FieldKind { PressureLike, StreamLike };

inline FieldKind other_kind(FieldKind k) {
  return k == FieldKind::PressureLike ? FieldKind::StreamLike : FieldKind::PressureLike;
}

inline std::string to_string(FieldKind k) {
  return k == FieldKind::PressureLike ? "pressure" : "stream";
}

inline FieldKind kind_from_string(const std::string& s) {
  if (s == "pressure") return FieldKind::PressureLike;
  if (s == "stream") return FieldKind::StreamLike;
  throw InvalidArgument("unknown field kind '" + s + "'");
}

/// (m, n, parity): parity +1 selects cos(2 pi m x), -1 selects sin(2 pi m x).
struct ModeIndex {
  int m = 0;
  int n = 0;
  int parity = 1;

  void validate() const {
    if (m < 0 || n < 0) throw InvalidArgument("mode indices must be non-negative");
    if (parity != 1 && parity != -1) throw InvalidArgument("parity must be +1 or -1");
    if (parity == -1 && m == 0) throw InvalidArgument("sin(0 x) is not a basis element");
  }
  /// m = 0 modes span the x-independent subspace.
  bool is_symmetric_mode() const { return m == 0; }

  friend bool operator==(const ModeIndex&, const ModeIndex&) = default;
};

/// Collocation grid x_j = j/nx, z_j = (j + 1/2)/nz.
struct GridSpec {
  int nx = 0;
  int nz = 0;

  double x(int j) const { return static_cast<double>(j) / nx; }
  double z(int j) const { return (j + 0.5) / nz; }

  /// Smallest grid on which the truncated basis is discretely orthogonal.
  static GridSpec for_truncation(int m_max, int n_max) { return {2 * m_max + 2, 2 * n_max + 2}; }
  /// Grid on which quadratic products of truncated fields project without aliasing.
  static GridSpec dealiased(int m_max, int n_max) { return {3 * m_max + 2, 2 * n_max + 2}; }

  void require_resolves(int m_max, int n_max) const {
    if (nx < 2 * m_max + 2 || nz < 2 * n_max + 2)
      throw ResolutionError("grid " + std::to_string(nx) + "x" + std::to_string(nz) +
                            " cannot resolve truncation (" + std::to_string(m_max) + "," +
                            std::to_string(n_max) + ")");
  }
};

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
class SpectralFieldT {
 public:
  using Matrix = MatrixX<Scalar>;

  SpectralFieldT() = default;
  SpectralFieldT(FieldKind kind, int m_max, int n_max)
      : kind_(kind),
        cos_(Matrix::Zero(m_max + 1, n_max + 1)),
        sin_(Matrix::Zero(m_max + 1, n_max + 1)) {
    if (m_max < 0 || n_max < 0) throw InvalidArgument("truncation must be non-negative");
  }

  FieldKind kind() const { return kind_; }
  int m_max() const { return static_cast<int>(cos_.rows()) - 1; }
  int n_max() const { return static_cast<int>(cos_.cols()) - 1; }

  /// Coefficients of cos(2 pi m x) (parity +1) and sin(2 pi m x) (parity -1).
  const Matrix& cos_part() const { return cos_; }
  const Matrix& sin_part() const { return sin_; }
  Matrix& cos_part() { return cos_; }
  Matrix& sin_part() { return sin_; }

  bool contains(const ModeIndex& idx) const {
    return idx.m <= m_max() && idx.n <= n_max() &&
           !(kind_ == FieldKind::StreamLike && idx.n == 0) && !(idx.parity == -1 && idx.m == 0);
  }

  Scalar operator[](const ModeIndex& idx) const {
    idx.validate();
    if (!contains(idx)) return Scalar(0);
    return idx.parity == 1 ? cos_(idx.m, idx.n) : sin_(idx.m, idx.n);
  }

  void set(const ModeIndex& idx, Scalar value) {
    idx.validate();
    if (!contains(idx)) throw InvalidArgument("mode outside truncation or absent for this kind");
    (idx.parity == 1 ? cos_ : sin_)(idx.m, idx.n) = value;
  }

  /// Zero the slots that are not basis elements (sin at m = 0, sin(0 z) for stream-like).
  void enforce_structure() {
    sin_.row(0).setZero();
    if (kind_ == FieldKind::StreamLike) {
      cos_.col(0).setZero();
      sin_.col(0).setZero();
    }
  }

  bool all_finite() const { return cos_.allFinite() && sin_.allFinite(); }

  Scalar max_abs() const {
    return std::max(cos_.cwiseAbs().maxCoeff(), sin_.cwiseAbs().maxCoeff());
  }

  SpectralFieldT& operator+=(const SpectralFieldT& o) {
    check_compatible(o);
    cos_ += o.cos_;
    sin_ += o.sin_;
    return *this;
  }
  SpectralFieldT& operator-=(const SpectralFieldT& o) {
    check_compatible(o);
    cos_ -= o.cos_;
    sin_ -= o.sin_;
    return *this;
  }
  SpectralFieldT& operator*=(Scalar s) {
    cos_ *= s;
    sin_ *= s;
    return *this;
  }
  friend SpectralFieldT operator+(SpectralFieldT a, const SpectralFieldT& b) { return a += b; }
  friend SpectralFieldT operator-(SpectralFieldT a, const SpectralFieldT& b) { return a -= b; }
  friend SpectralFieldT operator*(Scalar s, SpectralFieldT a) { return a *= s; }

  /// Copy into a different truncation, dropping or zero-filling modes.
  SpectralFieldT resized(int m_max, int n_max) const {
    SpectralFieldT out(kind_, m_max, n_max);
    const int mm = std::min(m_max, this->m_max()) + 1;
    const int nn = std::min(n_max, this->n_max()) + 1;
    out.cos_.topLeftCorner(mm, nn) = cos_.topLeftCorner(mm, nn);
    out.sin_.topLeftCorner(mm, nn) = sin_.topLeftCorner(mm, nn);
    return out;
  }

 private:
  void check_compatible(const SpectralFieldT& o) const {
    if (o.kind_ != kind_ || o.m_max() != m_max() || o.n_max() != n_max())
      throw InvalidArgument("incompatible spectral fields");
  }

  FieldKind kind_ = FieldKind::StreamLike;
  Matrix cos_;
  Matrix sin_;
};

using SpectralField = SpectralFieldT<double>;

// ---------------------------------------------------------------------------
// Pointwise evaluation

template <typename Scalar = double>
Scalar eval_basis(const ModeIndex& idx, FieldKind kind, Scalar x, Scalar z) {
  idx.validate();
  using std::cos;
  using std::sin;
  constexpr double pi = std::numbers::pi;
  if (x < 0 || x > 1 || z < 0 || z > 1) throw InvalidArgument("point outside the periodicity cell");
  const Scalar fx = idx.parity == 1 ? cos(2 * pi * idx.m * x) : sin(2 * pi * idx.m * x);
  const Scalar fz = kind == FieldKind::PressureLike ? cos(pi * idx.n * z) : sin(pi * idx.n * z);
  return fx * fz;
}

template <typename Scalar>
Scalar evaluate(const SpectralFieldT<Scalar>& f, Scalar x, Scalar z) {
  using std::cos;
  using std::sin;
  constexpr double pi = std::numbers::pi;
  Scalar sum(0);
  for (int m = 0; m <= f.m_max(); ++m) {
    const Scalar cx = cos(2 * pi * m * x), sx = sin(2 * pi * m * x);
    for (int n = 0; n <= f.n_max(); ++n) {
      const Scalar fz = f.kind() == FieldKind::PressureLike ? cos(pi * n * z) : sin(pi * n * z);
      sum += (f.cos_part()(m, n) * cx + f.sin_part()(m, n) * sx) * fz;
    }
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Transforms

namespace detail {

template <typename Scalar>
MatrixX<Scalar> x_table(const GridSpec& g, int m_max, bool sine) {
  constexpr double pi = std::numbers::pi;
  MatrixX<Scalar> t(g.nx, m_max + 1);
  for (int j = 0; j < g.nx; ++j)
    for (int m = 0; m <= m_max; ++m)
      t(j, m) = sine ? std::sin(2 * pi * m * g.x(j)) : std::cos(2 * pi * m * g.x(j));
  return t;
}

template <typename Scalar>
MatrixX<Scalar> z_table(const GridSpec& g, int n_max, FieldKind kind) {
  constexpr double pi = std::numbers::pi;
  MatrixX<Scalar> t(g.nz, n_max + 1);
  for (int j = 0; j < g.nz; ++j)
    for (int n = 0; n <= n_max; ++n)
      t(j, n) = kind == FieldKind::PressureLike ? std::cos(pi * n * g.z(j)) : std::sin(pi * n * g.z(j));
  return t;
}

}  // namespace detail

/// Values on the grid, indexed (x_j, z_j).
template <typename Scalar>
MatrixX<Scalar> to_physical(const SpectralFieldT<Scalar>& f, const GridSpec& g) {
  g.require_resolves(f.m_max(), f.n_max());
  const auto cx = detail::x_table<Scalar>(g, f.m_max(), false);
  const auto sx = detail::x_table<Scalar>(g, f.m_max(), true);
  const auto tz = detail::z_table<Scalar>(g, f.n_max(), f.kind());
  return (cx * f.cos_part() + sx * f.sin_part()) * tz.transpose();
}

/// Discrete projection onto the truncated basis. Exact inverse of to_physical
/// on the truncated space; modes above the truncation but below the grid's
/// alias limit are discarded exactly.
template <typename Scalar>
SpectralFieldT<Scalar> to_spectral(const MatrixX<Scalar>& values, FieldKind kind, int m_max, int n_max,
                                   const GridSpec& g) {
  if (values.rows() != g.nx || values.cols() != g.nz)
    throw InvalidArgument("grid values do not match the grid shape");
  if (g.nx < 2 * m_max + 2 || g.nz < n_max + 1)
    throw ResolutionError("grid below truncation");
  const auto cx = detail::x_table<Scalar>(g, m_max, false);
  const auto sx = detail::x_table<Scalar>(g, m_max, true);
  const auto tz = detail::z_table<Scalar>(g, n_max, kind);

  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> wx(m_max + 1), wz(n_max + 1);
  for (int m = 0; m <= m_max; ++m) wx(m) = Scalar(m == 0 ? 1 : 2) / g.nx;
  for (int n = 0; n <= n_max; ++n)
    wz(n) = Scalar(kind == FieldKind::PressureLike && n == 0 ? 1 : 2) / g.nz;

  SpectralFieldT<Scalar> f(kind, m_max, n_max);
  const MatrixX<Scalar> vz = values * tz;
  f.cos_part() = wx.asDiagonal() * (cx.transpose() * vz) * wz.asDiagonal();
  f.sin_part() = wx.asDiagonal() * (sx.transpose() * vz) * wz.asDiagonal();
  f.enforce_structure();
  return f;
}

// ---------------------------------------------------------------------------
// Differential operators (exact, per mode)

template <typename Scalar>
SpectralFieldT<Scalar> d_dx(const SpectralFieldT<Scalar>& f) {
  constexpr double pi = std::numbers::pi;
  SpectralFieldT<Scalar> out(f.kind(), f.m_max(), f.n_max());
  for (int m = 0; m <= f.m_max(); ++m) {
    const Scalar k = 2 * pi * m;
    out.cos_part().row(m) = k * f.sin_part().row(m);
    out.sin_part().row(m) = -k * f.cos_part().row(m);
  }
  return out;
}

/// Maps pressure-like to stream-like and back.
template <typename Scalar>
SpectralFieldT<Scalar> d_dz(const SpectralFieldT<Scalar>& f) {
  constexpr double pi = std::numbers::pi;
  SpectralFieldT<Scalar> out(other_kind(f.kind()), f.m_max(), f.n_max());
  const Scalar sign = f.kind() == FieldKind::PressureLike ? Scalar(-1) : Scalar(1);
  for (int n = 0; n <= f.n_max(); ++n) {
    out.cos_part().col(n) = sign * pi * n * f.cos_part().col(n);
    out.sin_part().col(n) = sign * pi * n * f.sin_part().col(n);
  }
  out.enforce_structure();
  return out;
}

/// -(4 pi^2 m^2 + pi^2 n^2), the eigenvalue of the Laplacian on mode (m, n).
inline double laplacian_symbol(int m, int n) {
  constexpr double pi = std::numbers::pi;
  return -(4 * pi * pi * m * m + pi * pi * n * n);
}

template <typename Scalar>
SpectralFieldT<Scalar> laplacian(const SpectralFieldT<Scalar>& f) {
  SpectralFieldT<Scalar> out = f;
  for (int m = 0; m <= f.m_max(); ++m)
    for (int n = 0; n <= f.n_max(); ++n) {
      out.cos_part()(m, n) *= laplacian_symbol(m, n);
      out.sin_part()(m, n) *= laplacian_symbol(m, n);
    }
  return out;
}

/// Inverse Laplacian on the modes with nonzero symbol; the (0,0) mode maps to 0.
template <typename Scalar>
SpectralFieldT<Scalar> inverse_laplacian(const SpectralFieldT<Scalar>& f) {
  SpectralFieldT<Scalar> out = f;
  for (int m = 0; m <= f.m_max(); ++m)
    for (int n = 0; n <= f.n_max(); ++n) {
      const double s = (m == 0 && n == 0) ? 0.0 : 1.0 / laplacian_symbol(m, n);
      out.cos_part()(m, n) *= s;
      out.sin_part()(m, n) *= s;
    }
  return out;
}

/// Truncated projection of the pointwise product a*b. Products are formed on
/// the dealiased grid, so the projection is exact.
template <typename Scalar>
SpectralFieldT<Scalar> multiply(const SpectralFieldT<Scalar>& a, const SpectralFieldT<Scalar>& b) {
  if (a.m_max() != b.m_max() || a.n_max() != b.n_max())
    throw InvalidArgument("product operands must share a truncation");
  const FieldKind kind = a.kind() == b.kind() ? FieldKind::PressureLike : FieldKind::StreamLike;
  const GridSpec g = GridSpec::dealiased(a.m_max(), a.n_max());
  const MatrixX<Scalar> prod = to_physical(a, g).cwiseProduct(to_physical(b, g));
  return to_spectral<Scalar>(prod, kind, a.m_max(), a.n_max(), g);
}

/// x-average of a field: keeps only the m = 0 row.
template <typename Scalar>
SpectralFieldT<Scalar> x_average(const SpectralFieldT<Scalar>& f) {
  SpectralFieldT<Scalar> out(f.kind(), f.m_max(), f.n_max());
  out.cos_part().row(0) = f.cos_part().row(0);
  return out;
}

/// L2(cell) norm squared of a single basis element.
inline double mode_norm_sq(int m, int n, FieldKind kind) {
  const double fx = m == 0 ? 1.0 : 0.5;
  const double fz = (kind == FieldKind::PressureLike && n == 0) ? 1.0 : 0.5;
  return fx * fz;
}

/// L2 inner product over the cell, exact for truncated fields.
template <typename Scalar>
Scalar inner(const SpectralFieldT<Scalar>& a, const SpectralFieldT<Scalar>& b) {
  if (a.kind() != b.kind()) throw InvalidArgument("inner product needs fields of the same kind");
  const int mm = std::min(a.m_max(), b.m_max()), nn = std::min(a.n_max(), b.n_max());
  Scalar sum(0);
  for (int m = 0; m <= mm; ++m)
    for (int n = 0; n <= nn; ++n)
      sum += mode_norm_sq(m, n, a.kind()) *
             (a.cos_part()(m, n) * b.cos_part()(m, n) + a.sin_part()(m, n) * b.sin_part()(m, n));
  return sum;
}

template <typename Scalar>
Scalar norm_sq(const SpectralFieldT<Scalar>& a) {
  return inner(a, a);
}

/// |grad f|^2 integrated over the cell; the wall terms vanish for both kinds.
template <typename Scalar>
Scalar grad_norm_sq(const SpectralFieldT<Scalar>& a) {
  Scalar sum(0);
  for (int m = 0; m <= a.m_max(); ++m)
    for (int n = 0; n <= a.n_max(); ++n)
      sum += -laplacian_symbol(m, n) * mode_norm_sq(m, n, a.kind()) *
             (a.cos_part()(m, n) * a.cos_part()(m, n) + a.sin_part()(m, n) * a.sin_part()(m, n));
  return sum;
}

// ---------------------------------------------------------------------------
// Velocity from a stream function: v^x = -Phi_z, v^z = Phi_x.

template <typename Scalar>
struct VelocityFieldT {
  SpectralFieldT<Scalar> vx;  // pressure-like (cos in z)
  SpectralFieldT<Scalar> vz;  // stream-like (sin in z)
};

using VelocityField = VelocityFieldT<double>;

template <typename Scalar>
VelocityFieldT<Scalar> velocity_from_stream(const SpectralFieldT<Scalar>& phi) {
  if (phi.kind() != FieldKind::StreamLike) throw InvalidArgument("stream function must be stream-like");
  return {Scalar(-1) * d_dz(phi), d_dx(phi)};
}

template <typename Scalar>
SpectralFieldT<Scalar> divergence(const VelocityFieldT<Scalar>& v) {
  return d_dx(v.vx) + d_dz(v.vz);
}

/// Components of v . grad w for a scalar w: the x-derivative part and the
/// z-derivative part are summed after exact projection.
template <typename Scalar>
SpectralFieldT<Scalar> advect(const VelocityFieldT<Scalar>& v, const SpectralFieldT<Scalar>& w) {
  return multiply(v.vx, d_dx(w)) + multiply(v.vz, d_dz(w));
}

/// Solves Lap P = rhs with homogeneous Neumann walls and zero-mean gauge.
/// The (0,0) coefficient of rhs is the solvability condition.
template <typename Scalar>
SpectralFieldT<Scalar> solve_neumann(const SpectralFieldT<Scalar>& rhs, Scalar tol = Scalar(1e-12)) {
  if (rhs.kind() != FieldKind::PressureLike) throw InvalidArgument("Neumann data must be pressure-like");
  const Scalar mean = rhs.cos_part()(0, 0);
  const Scalar scale = std::max<Scalar>(Scalar(1), rhs.max_abs());
  if (std::abs(mean) > tol * scale)
    throw InconsistentData("Neumann right-hand side has nonzero mean " + std::to_string(double(mean)));
  return inverse_laplacian(rhs);
}

/// Pressure of the Boussinesq system:
///   Lap Pi = -(1/Pr) div(v . grad v) + Ra tau_z,   Pi_z = 0 on the walls.
template <typename Scalar>
SpectralFieldT<Scalar> solve_pressure_neumann(const VelocityFieldT<Scalar>& v, const SpectralFieldT<Scalar>& tau,
                                              Scalar pr, Scalar ra, Scalar tol = Scalar(1e-12)) {
  if (tau.kind() != FieldKind::StreamLike) throw InvalidArgument("temperature must be stream-like");
  if (!(pr > 0)) throw InvalidArgument("Pr must be positive");
  const auto ax = advect(v, v.vx);  // pressure-like
  const auto az = advect(v, v.vz);  // stream-like
  SpectralFieldT<Scalar> rhs = Scalar(-1) / pr * (d_dx(ax) + d_dz(az));
  rhs += ra * d_dz(tau);
  return solve_neumann(rhs, tol);
}

}  // namespace convec::spectral
