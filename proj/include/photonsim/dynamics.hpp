#pragma once

#include <complex>
#include <vector>

#include "photonsim/device.hpp"

namespace photonsim {

using cplx = std::complex<double>;

// The six independent density-matrix entries of the {|f0>,|g1>,|g0>} subspace,
// written in the frame rotating at the instantaneous drive frequency.
struct ThreeLevelState {
    double rho_f0f0 = 0.0;
    double rho_g1g1 = 0.0;
    double rho_g0g0 = 0.0;
    cplx rho_f0g1{0.0, 0.0};
    cplx rho_f0g0{0.0, 0.0};
    cplx rho_g1g0{0.0, 0.0};
};

// Sampled drive: amplitude (V), instantaneous frequency (rad/us) and an
// additive phase offset (rad) on a uniform grid starting at t0. Outside the
// grid the amplitude is zero and frequency/phase hold their end values.
struct DrivePulse {
    double t0 = 0.0;
    double dt = 1e-3;  // default 1 ns grid
    std::vector<double> vd;
    std::vector<double> omega_d;
    std::vector<double> phase_offset;

    std::size_t size() const { return vd.size(); }
    double t_end() const { return t0 + dt * static_cast<double>(size() - 1); }
    void validate() const;  // equal lengths, dt > 0, at least 2 samples
};

// Complex <a_out(t)> samples, recorded relative to frame_freq (we use the
// resonator frequency), so a photon emitted at omega_ph rotates as
// exp(-i (omega_ph - frame_freq) t). Units 1/sqrt(us).
struct PhotonWaveform {
    double t0 = 0.0;
    double dt = 1e-3;
    double frame_freq = 0.0;
    std::vector<cplx> samples;

    double energy() const;    // trapezoid of |samples|^2
    double peak_abs() const;  // max |samples|
};

struct Trajectory {
    double t0 = 0.0;
    double dt = 1e-3;
    std::vector<ThreeLevelState> states;  // one per pulse grid point
    std::vector<double> emitted_cum;      // cumulative integral kappa*rho_g1g1 dt
    double emitted_energy = 0.0;          // final value of the ledger
};

struct IntegrationResult {
    Trajectory trajectory;
    PhotonWaveform waveform;
};

// Fixed-step explicit 4th-order integration of the six coupled equations
//   d rho_f0f0 = -2 Im(g* rho_f0g1)
//   d rho_g1g1 = +2 Im(g* rho_f0g1) - kappa rho_g1g1
//   d rho_g0g0 = kappa rho_g1g1
//   d rho_f0g1 = -i (Delta_d rho_f0g1 + g (rho_g1g1 - rho_f0f0)) - kappa/2 rho_f0g1
//   d rho_f0g0 = -i (delta_f0 rho_f0g0 + g rho_g1g0)
//   d rho_g1g0 = -i (delta_g1 rho_g1g0 + g* rho_f0g0) - kappa/2 rho_g1g0
// with g(t) = effective_coupling(transduce(vd(t))) * exp(+i phase_offset(t)),
// delta_f0(t) = 2 w_ge + alpha - 2 w_d(t) + stark, delta_g1(t) = w_r - w_d(t),
// Delta_d = delta_f0 - delta_g1. Pulse samples are interpolated linearly onto
// the integration grid (half-step sampling for the midpoint stages).
//
// Internally the g0-coherences are propagated with their common rotation
// integral((delta_f0 + delta_g1)/2) factored out, which keeps the integrated
// pair slowly varying; the trajectory reports them back in the drive frame.
// The waveform is sqrt(kappa) * rho_g1g0 re-referenced to frame_freq = w_r by
// the accumulated phase integral(w_d + delta_g1) bookkeeping.
//
// Requires dt_int <= 0.05/kappa and pulse.dt an integer multiple of dt_int.
// Aborts with a diagnostic if the state stops being finite.
IntegrationResult integrate(const DeviceParams& d, const DrivePulse& pulse,
                            const ThreeLevelState& initial, double dt_int);

// Closed-form solution of the (rho_f0g0, rho_g1g0) pair under a constant
// drive. With X = kappa^2/16 - g^2 - Delta^2/4, Y = kappa Delta/4,
// theta = atan2(Y, X), R = (X^2+Y^2)^(1/4):
//   gamma_pm = kappa/4 +- R cos(theta/2)
//   omega_pm = (delta_f0 + delta_g1)/2 +- R sin(theta/2)
// The slowly decaying branch carries (gamma_minus, omega_plus, C1) and the
// fast one (gamma_plus, omega_minus, C2):
//   rho_g1g0(t) = C1 e^{-(gamma_minus + i omega_plus) t}
//               + C2 e^{-(gamma_plus  + i omega_minus) t}.
struct SquareDriveSolution {
    double gamma_plus = 0.0;
    double gamma_minus = 0.0;
    double omega_plus = 0.0;
    double omega_minus = 0.0;
    cplx C1{0.0, 0.0};
    cplx C2{0.0, 0.0};
    double kappa = 0.0;
    double delta_g1 = 0.0;  // recording-frame bookkeeping

    cplx coherence_g1g0(double t) const;   // drive-frame rho_g1g0(t)
    cplx waveform_sample(double t) const;  // sqrt(kappa) rho_g1g0 e^{+i delta_g1 t}
};

SquareDriveSolution square_drive_analytic(const DeviceParams& d, double g_eff,
                                          double delta_f0, double delta_g1,
                                          cplx init_f0g0, cplx init_g1g0);

// Eigenvalues of the population block under constant resonant drive:
// lambda_1 = -kappa/2, lambda_pm = (-kappa +- sqrt(kappa^2 - 16 g^2))/2.
// The pair turns complex (population oscillation) for g > kappa/4.
struct RabiEigenvalues {
    double lambda_1 = 0.0;
    cplx lambda_plus{0.0, 0.0};
    cplx lambda_minus{0.0, 0.0};
    bool oscillatory = false;
};

RabiEigenvalues rabi_eigenvalues(double kappa, double g_eff);

// Adiabatic-elimination emission rate:
// Gamma_f = kappa g^2 / ((w_r - w_ph)^2 + (kappa/2)^2).
double emission_rate(const DeviceParams& d, double g_eff, double omega_ph);

// The slow envelope rate of a square-drive emission decays at Gamma_f / 2, so
// the rate estimate from a fitted envelope is 2 * gamma_minus.
double adiabatic_rate_from_envelope(double gamma_minus);

}  // namespace photonsim
