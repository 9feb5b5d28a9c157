#pragma once

// Time integration of the 2-D Boussinesq equations on the periodicity cell in
// stream-function/temperature form:
//
//   Phi_t = -Pr k^2 Phi - (Pr Ra / k^2) [tau_x] - P(v . grad v)
//   tau_t = -k^2 tau + [Phi_x] - [v . grad tau]
//
// where P(.) is the Galerkin projection of the advection onto the curl fields
// of the stream basis (it annihilates pressure gradients). The diffusion is
// integrated exactly per mode; everything else is explicit (two-stage,
// second order).

#include <functional>
#include <vector>

#include "convec/energy_analysis.hpp"
#include "convec/ob_state.hpp"
#include "convec/symmetric_subspace.hpp"

namespace convec::benard {

/// Advection terms in the coordinates of the state: `momentum` holds the stream
/// coefficients of the projected v . grad v, `heat` the coefficients of v . grad tau.
struct NonlinearTerms {
  SpectralField momentum;
  SpectralField heat;
};

NonlinearTerms nonlinear_term(const OBState& state);

OBState step(const OBState& state, const OBParams& params);

/// f_part carries the fluctuating fields (zero x-mean), s_part the S-profiles.
struct SplitState {
  OBState f_part;
  subspace::SProfiles s_part;
};

/// Advances the S-part in closed form and the fluctuating part with the extra
/// transport by A e_1 and by the mean temperature gradient.
SplitState step_split(const SplitState& state, const OBParams& params);

struct Trajectory {
  std::vector<OBState> states;
  std::vector<energy::EnergyRecord> records;
};

/// Runs to params.t_end, sampling every `sample_every` steps (the initial state
/// is always sampled). `observer`, if set, sees every sampled state.
Trajectory simulate(const OBState& initial, const OBParams& params, int sample_every,
                    const std::function<void(const OBState&)>& observer = {});

}  // namespace convec::benard
