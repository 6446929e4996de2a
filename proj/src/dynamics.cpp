#include "photonsim/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "photonsim/units.hpp"

namespace photonsim {

void DrivePulse::validate() const {
    if (!(dt > 0.0)) throw std::runtime_error("pulse: dt must be > 0");
    if (vd.size() < 2) throw std::runtime_error("pulse: need at least 2 samples");
    if (omega_d.size() != vd.size() || phase_offset.size() != vd.size())
        throw std::runtime_error("pulse: sample arrays must have equal length");
}

double PhotonWaveform::energy() const {
    if (samples.size() < 2) return 0.0;
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < samples.size(); ++k)
        acc += 0.5 * (std::norm(samples[k]) + std::norm(samples[k + 1])) * dt;
    return acc;
}

double PhotonWaveform::peak_abs() const {
    double m = 0.0;
    for (const cplx& s : samples) m = std::max(m, std::abs(s));
    return m;
}

namespace {

// Linear interpolation of the pulse samples at absolute time t. Amplitude is
// zero outside the pulse window; frequency and phase hold their end values.
struct PulseInterp {
    const DrivePulse& p;
    double n1;  // size-1 as double

    explicit PulseInterp(const DrivePulse& pulse)
        : p(pulse), n1(static_cast<double>(pulse.size() - 1)) {}

    double frac_index(double t) const { return (t - p.t0) / p.dt; }

    double vd(double t) const {
        const double x = frac_index(t);
        if (x < 0.0 || x > n1) return 0.0;  // off by any amount: no drive
        if (x >= n1) return p.vd.back();
        const std::size_t i = static_cast<std::size_t>(x);
        const double f = x - static_cast<double>(i);
        return p.vd[i] + f * (p.vd[i + 1] - p.vd[i]);
    }

    static double held(const std::vector<double>& a, double x, double n1) {
        if (x <= 0.0) return a.front();
        if (x >= n1) return a.back();
        const std::size_t i = static_cast<std::size_t>(x);
        const double f = x - static_cast<double>(i);
        return a[i] + f * (a[i + 1] - a[i]);
    }

    double omega_d(double t) const { return held(p.omega_d, frac_index(t), n1); }
    double phase(double t) const { return held(p.phase_offset, frac_index(t), n1); }
};

struct Coeffs {
    cplx g;          // complex coupling g_eff * exp(i phase_offset)
    double delta_d;  // delta_f0 - delta_g1
    double dbar;     // (delta_f0 + delta_g1)/2
};

// y layout: [P0 P1 P2 Re(F) Im(F) Re(U) Im(U) Re(V) Im(V)] with F = rho_f0g1
// and (U, V) the g0-coherence pair after factoring out the common rotation.
using State = std::array<double, 9>;

inline State deriv(const State& y, const Coeffs& c, double kappa) {
    const cplx F(y[3], y[4]), U(y[5], y[6]), V(y[7], y[8]);
    const cplx i(0.0, 1.0);
    const double pump = -2.0 * std::imag(std::conj(c.g) * F);  // dP0/dt
    const cplx dF = -i * (c.delta_d * F + c.g * (y[1] - y[0])) - 0.5 * kappa * F;
    const cplx dU = -i * (0.5 * c.delta_d) * U - i * c.g * V;
    const cplx dV = i * (0.5 * c.delta_d) * V - i * std::conj(c.g) * U - 0.5 * kappa * V;
    return State{pump,
                 -pump - kappa * y[1],
                 kappa * y[1],
                 dF.real(), dF.imag(),
                 dU.real(), dU.imag(),
                 dV.real(), dV.imag()};
}

inline State axpy(const State& y, double h, const State& k) {
    State out;
    for (int j = 0; j < 9; ++j) out[j] = y[j] + h * k[j];
    return out;
}

}  // namespace

IntegrationResult integrate(const DeviceParams& d, const DrivePulse& pulse,
                            const ThreeLevelState& initial, double dt_int) {
    d.validate();
    pulse.validate();
    if (!(dt_int > 0.0) || dt_int > 0.05 / d.kappa)
        throw std::runtime_error("integrate: dt_int must satisfy 0 < dt_int <= 0.05/kappa");
    // Substep so the pulse grid divides evenly; the realized step never
    // exceeds the requested dt_int.
    const long spr = std::max(1L, static_cast<long>(std::ceil(pulse.dt / dt_int - 1e-9)));

    const PulseInterp interp(pulse);
    const double wf0g1 = d.omega_f0g1();
    auto coeffs_at = [&](double t) -> Coeffs {
        const double v = interp.vd(t);
        const double Om = transduce(d, v);
        const double ge = effective_coupling(d, Om);
        const double wd = interp.omega_d(t);
        const double ph = interp.phase(t);
        const double delta_f0 = 2.0 * d.omega_ge + d.alpha - 2.0 * wd + stark_detuning(d, Om);
        const double delta_g1 = d.omega_r - wd;
        // Positive phase sign: with this recording convention, feeding a
        // measured waveform phase back additively into phase_offset is
        // contractive (each pass shrinks the residual).
        return Coeffs{ge * cplx(std::cos(ph), std::sin(ph)), delta_f0 - delta_g1,
                      0.5 * (delta_f0 + delta_g1)};
    };

    const std::size_t n_rec = pulse.size();
    const double h = pulse.dt / static_cast<double>(spr);
    const double sqk = std::sqrt(d.kappa);

    State y{initial.rho_f0f0, initial.rho_g1g1, initial.rho_g0g0,
            initial.rho_f0g1.real(), initial.rho_f0g1.imag(),
            initial.rho_f0g0.real(), initial.rho_f0g0.imag(),
            initial.rho_g1g0.real(), initial.rho_g1g0.imag()};

    IntegrationResult res;
    res.trajectory.t0 = pulse.t0;
    res.trajectory.dt = pulse.dt;
    res.trajectory.states.reserve(n_rec);
    res.trajectory.emitted_cum.reserve(n_rec);
    res.waveform.t0 = pulse.t0;
    res.waveform.dt = pulse.dt;
    res.waveform.frame_freq = d.omega_r;
    res.waveform.samples.reserve(n_rec);

    double emitted = 0.0;
    double pacc = 0.0;  // integral of Delta_d (relative frame phase, used as pacc/2)
    double phiacc = 0.0;  // integral of dbar (factored-out common rotation)

    Coeffs c_lo = coeffs_at(pulse.t0);
    for (std::size_t k = 0; k < n_rec; ++k) {
        const double t_rec = pulse.t0 + static_cast<double>(k) * pulse.dt;
        // record
        const cplx eP(std::cos(0.5 * pacc), -std::sin(0.5 * pacc));
        const cplx ePhi(std::cos(phiacc), -std::sin(phiacc));
        const cplx V(y[7], y[8]), U(y[5], y[6]);
        ThreeLevelState s;
        s.rho_f0f0 = y[0];
        s.rho_g1g1 = y[1];
        s.rho_g0g0 = y[2];
        s.rho_f0g1 = cplx(y[3], y[4]);
        s.rho_f0g0 = U * ePhi;
        s.rho_g1g0 = V * ePhi;
        res.trajectory.states.push_back(s);
        res.trajectory.emitted_cum.push_back(emitted);
        res.waveform.samples.push_back(sqk * V * eP);
        bool finite = true;
        for (double val : y) finite = finite && std::isfinite(val);
        if (!finite) {
            char msg[128];
            std::snprintf(msg, sizeof msg, "integrate: state not finite at t = %.6f us", t_rec);
            throw std::runtime_error(msg);
        }
        if (k + 1 == n_rec) break;

        for (long s_i = 0; s_i < spr; ++s_i) {
            const double t = t_rec + static_cast<double>(s_i) * h;
            const Coeffs c_mid = coeffs_at(t + 0.5 * h);
            const Coeffs c_hi = coeffs_at(t + h);
            const State k1 = deriv(y, c_lo, d.kappa);
            const State k2 = deriv(axpy(y, 0.5 * h, k1), c_mid, d.kappa);
            const State k3 = deriv(axpy(y, 0.5 * h, k2), c_mid, d.kappa);
            const State k4 = deriv(axpy(y, h, k3), c_hi, d.kappa);
            const double p1_before = y[1];
            for (int j = 0; j < 9; ++j)
                y[j] += (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            emitted += d.kappa * 0.5 * (p1_before + y[1]) * h;
            pacc += 0.5 * (c_lo.delta_d + c_hi.delta_d) * h;
            phiacc += 0.5 * (c_lo.dbar + c_hi.dbar) * h;
            c_lo = c_hi;
        }
    }
    res.trajectory.emitted_energy = emitted;
    return res;
}

cplx SquareDriveSolution::coherence_g1g0(double t) const {
    const cplx i(0.0, 1.0);
    return C1 * std::exp(-(gamma_minus + i * omega_plus) * t) +
           C2 * std::exp(-(gamma_plus + i * omega_minus) * t);
}

cplx SquareDriveSolution::waveform_sample(double t) const {
    const cplx i(0.0, 1.0);
    return std::sqrt(kappa) * coherence_g1g0(t) * std::exp(i * delta_g1 * t);
}

SquareDriveSolution square_drive_analytic(const DeviceParams& d, double g_eff,
                                          double delta_f0, double delta_g1,
                                          cplx init_f0g0, cplx init_g1g0) {
    const double kappa = d.kappa;
    const double Delta = delta_f0 - delta_g1;
    const double dbar = 0.5 * (delta_f0 + delta_g1);
    const double X = kappa * kappa / 16.0 - g_eff * g_eff - Delta * Delta / 4.0;
    const double Y = kappa * Delta / 4.0;
    const double theta = std::atan2(Y, X);
    const double R = std::pow(X * X + Y * Y, 0.25);

    SquareDriveSolution sol;
    sol.kappa = kappa;
    sol.delta_g1 = delta_g1;
    sol.gamma_minus = kappa / 4.0 - R * std::cos(0.5 * theta);
    sol.gamma_plus = kappa / 4.0 + R * std::cos(0.5 * theta);
    sol.omega_plus = dbar + R * std::sin(0.5 * theta);
    sol.omega_minus = dbar - R * std::sin(0.5 * theta);

    if (g_eff == 0.0) {
        sol.C1 = cplx(0.0, 0.0);  // the undamped branch lives entirely in rho_f0g0
        sol.C2 = init_g1g0;
        return sol;
    }

    // Eigen-decomposition of the coherence pair with the common rotation at
    // dbar factored out: eigenvalues mu = -kappa/4 +- sqrt(X - iY), slow one
    // first; eigenvectors (-i g, mu + i Delta/2).
    const cplx i(0.0, 1.0);
    const cplx s = std::sqrt(cplx(X, -Y));
    const cplx mu_a = -kappa / 4.0 + s;
    const cplx mu_b = -kappa / 4.0 - s;
    const cplx ea = mu_a + i * (0.5 * Delta);
    const cplx eb = mu_b + i * (0.5 * Delta);
    const cplx det = 2.0 * i * g_eff * s;
    const cplx c_a = (eb * init_f0g0 + i * g_eff * init_g1g0) / det;
    const cplx c_b = (-ea * init_f0g0 - i * g_eff * init_g1g0) / det;
    sol.C1 = c_a * ea;
    sol.C2 = c_b * eb;
    return sol;
}

RabiEigenvalues rabi_eigenvalues(double kappa, double g_eff) {
    if (!(kappa > 0.0)) throw std::runtime_error("rabi_eigenvalues: kappa must be > 0");
    const double g = std::abs(g_eff);
    RabiEigenvalues r;
    r.lambda_1 = -0.5 * kappa;
    const cplx sq = std::sqrt(cplx(kappa * kappa - 16.0 * g * g, 0.0));
    r.lambda_plus = 0.5 * (-kappa + sq);
    r.lambda_minus = 0.5 * (-kappa - sq);
    r.oscillatory = g > kappa / 4.0;
    return r;
}

double emission_rate(const DeviceParams& d, double g_eff, double omega_ph) {
    const double det = d.omega_r - omega_ph;
    return d.kappa * g_eff * g_eff / (det * det + 0.25 * d.kappa * d.kappa);
}

double adiabatic_rate_from_envelope(double gamma_minus) { return 2.0 * gamma_minus; }

}  // namespace photonsim
