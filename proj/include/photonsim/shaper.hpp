#pragma once

#include <vector>

#include "photonsim/dynamics.hpp"
#include "photonsim/spectroscopy.hpp"

namespace photonsim {

// Real, time-symmetric target envelope on a uniform grid. The grid is chosen
// with an odd sample count so t = 0 and both truncation endpoints are exact
// grid points, which keeps the trapezoid normalization and the mirror
// symmetry tight.
struct TargetWaveform {
    double gamma_ph = 0.0;  // shape rate parameter (rad/us)
    double epsilon = 0.0;   // truncated tail energy
    double t0 = 0.0;        // = -duration/2
    double dt = 1e-3;
    std::vector<double> samples;  // amplitude, 1/sqrt(us)

    double duration() const { return dt * static_cast<double>(samples.size() - 1); }
    double energy() const;              // trapezoid of samples^2
    double sample_at(double t) const;   // linear interpolation, 0 outside the window
};

// psi(t) = sqrt(gamma_ph/2) sech(gamma_ph t) on [-T, T] with
// T = artanh(1 - epsilon_trunc)/gamma_ph, so the two truncated tails hold
// epsilon_trunc of the energy between them. dt_hint is rounded so the window
// divides evenly (the realized step is within one part in ~400 of the hint).
TargetWaveform sech_target(double gamma_ph, double epsilon_trunc, double dt_hint = 1e-3);

// Emission rate that reproduces the target envelope:
//   Gamma(t) = psi(t)^2 / (1 - epsilon/2 - integral_{-T}^{t} psi^2 dt')
// (the epsilon/2 accounts for the discarded leading tail). For the sech
// target this equals gamma_ph (1 + tanh(gamma_ph t)). Throws if the
// denominator falls to the truncation floor (epsilon chosen too large).
std::vector<double> target_emission_rate(const TargetWaveform& w);

struct FeasibilityReport {
    bool feasible = false;
    double margin = 0.0;          // available_rate / required_rate
    double required_rate = 0.0;   // sup_t Gamma_target(t)
    double available_rate = 0.0;  // calibrated maximum of the fitted rate map
    double limiting_vd = 0.0;     // amplitude at which the fitted map peaks
};

// The design is feasible iff the fitted rate map reaches the peak target rate
// (which approaches 2*gamma_ph at the trailing edge).
FeasibilityReport check_feasibility(const CalibrationTable& table, const TargetWaveform& w);

// Per-sample inversion of the fitted rate map on its monotone domain.
std::vector<double> invert_amplitude(const CalibrationTable& table,
                                     const std::vector<double>& rate);

// Pair each amplitude sample with the fitted drive frequency at that
// amplitude; phase_offset starts at zero.
DrivePulse synthesize(const CalibrationTable& table, const std::vector<double>& vd, double t0,
                      double dt);

// Append pad (us) of zero amplitude with the final drive frequency held, so
// integration captures the emission tail after the drive ends.
DrivePulse extend_with_tail(const DrivePulse& p, double pad);

struct PhaseCorrectionResult {
    DrivePulse pulse;
    int passes = 0;                 // corrections actually applied
    double residual_im_frac = 0.0;  // max|Im psi|/max|psi| at the last check
    bool converged = false;
};

// Iterative phase correction: simulate from the coherent initial state,
// demodulate the emission at target_omega_ph, unwrap its phase over the
// >= 5% amplitude support (held flat outside), and add that profile to the
// pulse's phase_offset. Stops early once max|Im psi|/max|psi| < 0.02, and
// never applies more than `iterations` corrections. Amplitude samples are
// untouched.
PhaseCorrectionResult phase_correct(const DeviceParams& d, const DrivePulse& pulse,
                                    double target_omega_ph, int iterations = 2,
                                    double dt_int = 1e-4);

// Time-symmetry metric: s = max_t0 |integral w(t0 - t) w(t) dt| / integral
// |w(t)|^2 dt. The autoconvolution is searched at sample resolution and
// refined with a parabola through the peak. s = 1 for any envelope symmetric
// about some center (up to a global phase); invariant under time shift and
// global phase.
double time_symmetry(const PhotonWaveform& w);

// samples[k] * exp(+i (omega_ref - frame_freq)(t0 + k dt)). Returns bare
// samples; composing two demodulations therefore multiplies the phase ramps:
// demod(demod(w,a),b) = demod(w, a + b - frame_freq).
std::vector<cplx> demodulate(const PhotonWaveform& w, double omega_ref);

// Unwrapped phase of the samples on the support where |s| >= support_frac of
// the peak, extended flat before/after. Length matches samples.
std::vector<double> phase_profile(const std::vector<cplx>& samples, double support_frac = 0.05);

}  // namespace photonsim
