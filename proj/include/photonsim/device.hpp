#pragma once

#include <complex>
#include <utility>
#include <vector>

namespace photonsim {

// Fixed circuit parameters of the emulated device. All angular, rad/us.
struct DeviceParams {
    double omega_ge;       // qubit |g>-|e> transition
    double alpha;          // anharmonicity (negative for a transmon)
    double omega_r;        // effective (hybridized) resonator frequency
    double kappa;          // effective resonator linewidth, > 0
    double g_qr;           // qubit-resonator coupling
    double chi;            // qubit-state-dependent dispersive shift
    double transduction_k; // rad/us per volt, AWG amplitude -> drive strength
    double stark_f0;       // quadratic drive-power shift of delta_f0, units us (delta = stark_f0 * Omega_d^2)

    // 2*omega_ge + alpha - omega_r: the undriven |f0>-|g1> transition frequency.
    double omega_f0g1() const { return 2.0 * omega_ge + alpha - omega_r; }

    void validate() const;  // throws std::runtime_error on invariant violation
};

// Bare resonator + Purcell-filter pair before hybridization.
struct BareResonatorFilterParams {
    double omega_r_bare;
    double omega_f_bare;
    double J;        // resonator-filter coupling
    double kappa_f;  // filter external rate, > 0
    double chi;      // dispersive shift entering the reflection model
    double theta;    // impedance-mismatch angle, rad

    void validate() const;
};

struct HybridizedMode {
    double omega;
    double kappa;
};

// Frequencies and linewidths of the two hybridized resonator-filter modes.
// Xi = ((w_r - w_f) + i*kappa_f/2)^2 + 4 J^2, principal square root;
// w_pm = (w_r + w_f)/2 +- Re(sqrt(Xi))/2, kappa_pm = kappa_f/2 -+ Im(sqrt(Xi)).
// Returns (plus, minus). Identities: kappa_+ + kappa_- = kappa_f and
// w_+ + w_- = w_r + w_f hold exactly.
std::pair<HybridizedMode, HybridizedMode> hybridize_modes(const BareResonatorFilterParams& p);

// Reflection-coefficient ratio S11_g(w)/S11_e(w) over a frequency grid, with
// S11 = cos(theta) + e^{i theta} * i kappa_f (w - w_rb) /
//       (((w - w_fb) - i kappa_f/2)(w - w_rb) + J^2)
// and the |e>-state bare resonator shifted by chi.
std::vector<std::complex<double>> reflection_ratio(const BareResonatorFilterParams& p,
                                                   const std::vector<double>& omega_grid);

// Raman coupling between |f0> and |g1> induced by a drive of strength Omega_d:
// g_eff = g_qr * alpha * Omega_d / (sqrt(2) (w_r - w_ge)(w_r - w_ge - alpha)).
// Linear in Omega_d, sign preserved (negative for a transmon driven below the
// resonator).
double effective_coupling(const DeviceParams& d, double Omega_d);

// AWG volts -> drive strength. Linear; rejects negative amplitudes.
double transduce(const DeviceParams& d, double vd);

// Drive-power-dependent shift added to delta_f0 inside the integrator:
// stark_f0 * Omega_d^2. This is the emulation knob that makes the drive-to-
// photon frequency map nontrivial at large amplitudes.
double stark_detuning(const DeviceParams& d, double Omega_d);

// Built-in defaults for the emulated hardware.
DeviceParams default_device();
BareResonatorFilterParams default_bare_modes();

}  // namespace photonsim
