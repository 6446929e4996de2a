#include "photonsim/shaper.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

#include "photonsim/units.hpp"

namespace photonsim {

double TargetWaveform::energy() const {
    if (samples.size() < 2) return 0.0;
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < samples.size(); ++k)
        acc += 0.5 * (samples[k] * samples[k] + samples[k + 1] * samples[k + 1]) * dt;
    return acc;
}

double TargetWaveform::sample_at(double t) const {
    const double x = (t - t0) / dt;
    const auto n1 = static_cast<double>(samples.size() - 1);
    if (x < 0.0 || x > n1) return 0.0;
    if (x >= n1) return samples.back();
    const auto k = static_cast<std::size_t>(x);
    const double f = x - static_cast<double>(k);
    return samples[k] + f * (samples[k + 1] - samples[k]);
}

TargetWaveform sech_target(double gamma_ph, double epsilon_trunc, double dt_hint) {
    if (!(gamma_ph > 0.0)) throw std::invalid_argument("sech_target: gamma_ph must be positive");
    if (!(epsilon_trunc > 0.0 && epsilon_trunc < 0.1))
        throw std::invalid_argument("sech_target: epsilon_trunc must lie in (0, 0.1)");
    if (!(dt_hint > 0.0)) throw std::invalid_argument("sech_target: dt_hint must be positive");

    // artanh(1 - eps) = log((2 - eps)/eps) / 2
    const double T = 0.5 * std::log((2.0 - epsilon_trunc) / epsilon_trunc) / gamma_ph;
    const auto m = std::max<long long>(1, std::llround(T / dt_hint));
    TargetWaveform w;
    w.gamma_ph = gamma_ph;
    w.epsilon = epsilon_trunc;
    w.dt = T / static_cast<double>(m);
    w.t0 = -T;
    const std::size_t n = static_cast<std::size_t>(2 * m) + 1;
    w.samples.resize(n);
    const double amp = std::sqrt(gamma_ph / 2.0);
    for (long long k = 0; k <= m; ++k) {
        const double t = -T + w.dt * static_cast<double>(k);
        const double v = amp / std::cosh(gamma_ph * t);
        w.samples[static_cast<std::size_t>(k)] = v;
        w.samples[n - 1 - static_cast<std::size_t>(k)] = v;  // exact mirror symmetry
    }
    return w;
}

std::vector<double> target_emission_rate(const TargetWaveform& w) {
    const std::size_t n = w.samples.size();
    if (n < 2) throw std::invalid_argument("target_emission_rate: target too short");
    std::vector<double> rate(n);
    double cum = 0.0;  // trapezoid of psi^2 from the left edge
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0) {
            cum += 0.5 * (w.samples[k - 1] * w.samples[k - 1] + w.samples[k] * w.samples[k]) *
                   w.dt;
        }
        const double denom = 1.0 - 0.5 * w.epsilon - cum;
        if (denom <= 0.45 * w.epsilon) {
            throw std::runtime_error(
                "target_emission_rate: remaining energy fell to the truncation floor "
                "(epsilon too large for this window)");
        }
        rate[k] = w.samples[k] * w.samples[k] / denom;
    }
    return rate;
}

FeasibilityReport check_feasibility(const CalibrationTable& table, const TargetWaveform& w) {
    const std::vector<double> rate = target_emission_rate(w);
    FeasibilityReport rep;
    rep.required_rate = *std::max_element(rate.begin(), rate.end());
    rep.available_rate = table.gamma_max();
    rep.limiting_vd = table.vd_mono_max;
    rep.margin = rep.required_rate > 0.0 ? rep.available_rate / rep.required_rate
                                         : std::numeric_limits<double>::infinity();
    rep.feasible = rep.margin >= 1.0;
    return rep;
}

std::vector<double> invert_amplitude(const CalibrationTable& table,
                                     const std::vector<double>& rate) {
    std::vector<double> vd(rate.size());
    for (std::size_t k = 0; k < rate.size(); ++k) vd[k] = table.invert_gamma(rate[k]);
    return vd;
}

DrivePulse synthesize(const CalibrationTable& table, const std::vector<double>& vd, double t0,
                      double dt) {
    DrivePulse p;
    p.t0 = t0;
    p.dt = dt;
    p.vd = vd;
    p.omega_d.resize(vd.size());
    for (std::size_t k = 0; k < vd.size(); ++k) p.omega_d[k] = table.omegad_eval(vd[k]);
    p.phase_offset.assign(vd.size(), 0.0);
    p.validate();
    return p;
}

DrivePulse extend_with_tail(const DrivePulse& p, double pad) {
    p.validate();
    if (!(pad >= 0.0)) throw std::invalid_argument("extend_with_tail: pad must be non-negative");
    DrivePulse out = p;
    const auto extra = static_cast<std::size_t>(std::ceil(pad / p.dt - 1e-9));
    out.vd.insert(out.vd.end(), extra, 0.0);
    out.omega_d.insert(out.omega_d.end(), extra, p.omega_d.back());
    out.phase_offset.insert(out.phase_offset.end(), extra, p.phase_offset.back());
    return out;
}

PhaseCorrectionResult phase_correct(const DeviceParams& d, const DrivePulse& pulse,
                                    double target_omega_ph, int iterations, double dt_int) {
    if (iterations < 0) throw std::invalid_argument("phase_correct: iterations must be >= 0");
    ThreeLevelState coherent;
    coherent.rho_f0f0 = 0.5;
    coherent.rho_g0g0 = 0.5;
    coherent.rho_f0g0 = cplx(0.5, 0.0);

    PhaseCorrectionResult result;
    result.pulse = pulse;
    for (;;) {
        const IntegrationResult sim = integrate(d, result.pulse, coherent, dt_int);
        const std::vector<cplx> psi = demodulate(sim.waveform, target_omega_ph);
        double peak = 0.0, peak_im = 0.0;
        for (const cplx& s : psi) {
            peak = std::max(peak, std::abs(s));
            peak_im = std::max(peak_im, std::abs(s.imag()));
        }
        if (peak <= 0.0) throw std::runtime_error("phase_correct: pulse produces no emission");
        result.residual_im_frac = peak_im / peak;
        if (result.residual_im_frac < 0.02) {
            result.converged = true;
            return result;
        }
        if (result.passes >= iterations) {
            result.converged = false;
            return result;
        }
        const std::vector<double> phi = phase_profile(psi, 0.05);
        for (std::size_t k = 0; k < phi.size(); ++k) result.pulse.phase_offset[k] += phi[k];
        ++result.passes;
    }
}

double time_symmetry(const PhotonWaveform& w) {
    const std::size_t n = w.samples.size();
    if (n < 3) throw std::invalid_argument("time_symmetry: waveform too short");
    double energy = 0.0;
    for (const cplx& s : w.samples) energy += std::norm(s);
    energy *= w.dt;
    if (energy <= 0.0) throw std::runtime_error("time_symmetry: zero-energy waveform");

    // |autoconvolution| on the doubled grid; consistent plain-sum quadrature
    // in numerator and denominator so a symmetric envelope scores exactly 1.
    std::vector<double> conv(2 * n - 1);
    for (std::size_t m = 0; m < conv.size(); ++m) {
        const std::size_t jlo = m + 1 > n ? m + 1 - n : 0;
        const std::size_t jhi = std::min(m, n - 1);
        cplx acc{0.0, 0.0};
        for (std::size_t j = jlo; j <= jhi; ++j) acc += w.samples[m - j] * w.samples[j];
        conv[m] = std::abs(acc) * w.dt;
    }
    std::size_t mstar = 0;
    for (std::size_t m = 1; m < conv.size(); ++m)
        if (conv[m] > conv[mstar]) mstar = m;
    double peak = conv[mstar];
    if (mstar > 0 && mstar + 1 < conv.size()) {
        const double l = conv[mstar - 1], c = conv[mstar], r = conv[mstar + 1];
        const double curv = 2.0 * c - l - r;
        if (curv > 0.0) peak = c + (l - r) * (l - r) / (8.0 * curv);
    }
    return peak / energy;
}

std::vector<cplx> demodulate(const PhotonWaveform& w, double omega_ref) {
    std::vector<cplx> out(w.samples.size());
    const double dw = omega_ref - w.frame_freq;
    for (std::size_t k = 0; k < out.size(); ++k) {
        const double t = w.t0 + w.dt * static_cast<double>(k);
        out[k] = w.samples[k] * std::polar(1.0, dw * t);
    }
    return out;
}

std::vector<double> phase_profile(const std::vector<cplx>& samples, double support_frac) {
    const std::size_t n = samples.size();
    if (n == 0) throw std::invalid_argument("phase_profile: empty sample set");
    double peak = 0.0;
    for (const cplx& s : samples) peak = std::max(peak, std::abs(s));
    if (peak <= 0.0) throw std::runtime_error("phase_profile: all samples are zero");
    const double level = support_frac * peak;
    std::size_t lo = 0, hi = n - 1;
    while (lo < n && std::abs(samples[lo]) < level) ++lo;
    while (hi > lo && std::abs(samples[hi]) < level) --hi;

    std::vector<double> phi(n);
    phi[lo] = std::arg(samples[lo]);
    for (std::size_t k = lo + 1; k <= hi; ++k) {
        double step = std::arg(samples[k]) - std::arg(samples[k - 1]);
        while (step > pi_val) step -= two_pi;
        while (step < -pi_val) step += two_pi;
        phi[k] = phi[k - 1] + step;
    }
    for (std::size_t k = 0; k < lo; ++k) phi[k] = phi[lo];
    for (std::size_t k = hi + 1; k < n; ++k) phi[k] = phi[hi];
    return phi;
}

}  // namespace photonsim
