#pragma once

#include <cmath>
#include <string>

#include "convec/spectral_basis.hpp"

namespace convec::benard {

using spectral::FieldKind;
using spectral::SpectralField;
using spectral::VelocityField;

/// Parameters of a Boussinesq run on the periodicity cell.
struct OBParams {
  double pr = 1.0;
  double ra = 0.0;
  double dt = 1e-3;
  double t_end = 1.0;
  int m_max = 8;
  int n_max = 8;

  /// Heuristic bound for the explicit buoyancy/source coupling.
  static double max_stable_dt(double ra) { return 0.5 / std::sqrt(std::max(ra, 1.0)); }

  void validate() const {
    if (!(pr > 0)) throw InvalidArgument("Pr must be positive");
    if (!std::isfinite(ra)) throw InvalidArgument("Ra must be finite");
    if (!(dt > 0)) throw InvalidArgument("dt must be positive");
    if (!(t_end > 0)) throw InvalidArgument("t_end must be positive");
    if (m_max < 0 || n_max < 1) throw InvalidArgument("truncation needs m_max >= 0 and n_max >= 1");
    if (dt > max_stable_dt(ra))
      throw InvalidArgument("dt = " + std::to_string(dt) + " exceeds the stability bound " +
                            std::to_string(max_stable_dt(ra)));
  }
};

/// Stream function and temperature deviation, both sin(pi n z) in z.
/// Horizontal mean flows (the Galilean null solutions) are not representable;
/// the velocity is zero-mean by construction.
struct OBState {
  SpectralField phi;
  SpectralField tau;
  double t = 0.0;

  static OBState zero(int m_max, int n_max) {
    return {SpectralField(FieldKind::StreamLike, m_max, n_max), SpectralField(FieldKind::StreamLike, m_max, n_max),
            0.0};
  }

  int m_max() const { return phi.m_max(); }
  int n_max() const { return phi.n_max(); }
  VelocityField velocity() const { return spectral::velocity_from_stream(phi); }
  bool all_finite() const { return phi.all_finite() && tau.all_finite() && std::isfinite(t); }

  /// Largest |coefficient| over the m >= 1 modes.
  double max_fluctuating_coeff() const {
    const auto rows = [](const SpectralField& f) {
      if (f.m_max() == 0) return 0.0;
      const int r = f.m_max();
      return std::max(f.cos_part().bottomRows(r).cwiseAbs().maxCoeff(),
                      f.sin_part().bottomRows(r).cwiseAbs().maxCoeff());
    };
    return std::max(rows(phi), rows(tau));
  }
};

}  // namespace convec::benard
