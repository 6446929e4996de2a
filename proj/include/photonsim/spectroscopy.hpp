#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "photonsim/dynamics.hpp"

namespace photonsim {

// One grid point of the square-pulse emission sweep.
struct SweepRecord {
    double vd = 0.0;
    double omega_d = 0.0;
    double gamma_f = 0.0;       // fitted emission rate
    double omega_ph = 0.0;      // fitted photon frequency (0 when no emission)
    double fit_residual = 0.0;  // RMS residual of the log-envelope fit
    bool oscillatory = false;   // |g_eff| > kappa/4: excluded from calibration
};

// Fitted maps gamma_f(V_d) and omega_d(V_d) at one target photon frequency.
// Both are even polynomials in V_d (powers 0,2,...,10); the constant term of
// the rate map is pinned to zero.
struct CalibrationTable {
    double target_omega_ph = 0.0;
    std::array<double, 6> gamma_coeffs{};   // coefficient of vd^(2k)
    std::array<double, 6> omegad_coeffs{};
    double vd_max = 0.0;       // fitted domain [0, vd_max]
    double vd_mono_max = 0.0;  // gamma_eval strictly increasing on [0, vd_mono_max]

    double gamma_eval(double vd) const;
    double omegad_eval(double vd) const;
    double gamma_max() const { return gamma_eval(vd_mono_max); }

    // Solve gamma_eval(vd) = gamma by bisection on the monotone domain,
    // 1e-6 relative tolerance. Throws if gamma exceeds the calibrated maximum.
    double invert_gamma(double gamma) const;

    std::string to_json_string() const;
    static CalibrationTable from_json_string(const std::string& text);
};

// Square-pulse sweep over the (V_d, omega_d) grid: integrate each point with
// the coherent initial state (rho_f0f0 = rho_g0g0 = rho_f0g0 = 1/2), then fit
// the envelope and locate the spectral peak. Points with |g_eff| > kappa/4
// are flagged oscillatory and carry zeroed fit fields. pulse_len should be at
// least ~10 / (smallest gamma_f of interest) so the envelope is resolvable.
std::vector<SweepRecord> run_sweep(const DeviceParams& d, const std::vector<double>& vd_grid,
                                   const std::vector<double>& omega_d_grid, double pulse_len,
                                   double dt_int = 1e-4, int workers = 1);

// Least-squares line fit of log|samples| over [discard, end], skipping the
// trailing part below 1e-5 of the waveform peak. Returns (decay rate, RMS
// residual). discard should be >= 10/kappa so the fast transient has died.
// Rejects windows below the noise floor and non-monotone (oscillating)
// envelopes.
std::pair<double, double> fit_envelope(const PhotonWaveform& w, double discard);

// Absolute photon frequency from the spectral peak: FFT with 8x zero padding,
// then quadratic interpolation on the log-magnitude of the three bins around
// the peak. Rejects spectra with two comparable maxima.
double extract_frequency(const PhotonWaveform& w);

// Intersect each V_d row of the sweep with the vertical line omega_ph =
// target (linear interpolation in omega_d between the two bracketing grid
// points, trusted only when the bracketing omega_ph gap is <= tolerance),
// then fit gamma_f and omega_d against V_d with even polynomials. Rows that
// never reach the target are skipped; fewer than 6 usable rows is an error.
CalibrationTable build_table(const std::vector<SweepRecord>& records, double target_omega_ph,
                             double tolerance);

}  // namespace photonsim
