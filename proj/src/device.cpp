#include "photonsim/device.hpp"

#include <cmath>
#include <stdexcept>

#include "photonsim/units.hpp"

namespace photonsim {

void DeviceParams::validate() const {
    if (!(kappa > 0.0)) throw std::runtime_error("device: kappa must be > 0");
    if (!(transduction_k > 0.0)) throw std::runtime_error("device: transduction_k must be > 0");
    if (alpha == 0.0) throw std::runtime_error("device: alpha must be nonzero");
    if (omega_r == omega_ge || omega_r == omega_ge + alpha)
        throw std::runtime_error("device: Raman denominators vanish (omega_r hits a qubit transition)");
}

void BareResonatorFilterParams::validate() const {
    if (!(kappa_f > 0.0)) throw std::runtime_error("device: kappa_f must be > 0");
    if (J < 0.0) throw std::runtime_error("device: J must be >= 0");
}

std::pair<HybridizedMode, HybridizedMode> hybridize_modes(const BareResonatorFilterParams& p) {
    p.validate();
    const std::complex<double> z(p.omega_r_bare - p.omega_f_bare, p.kappa_f / 2.0);
    // Principal branch keeps the mode assignment continuous from J = 0 when
    // the resonator sits above the filter.
    const std::complex<double> root = std::sqrt(z * z + 4.0 * p.J * p.J);
    const double mean = 0.5 * (p.omega_r_bare + p.omega_f_bare);
    HybridizedMode plus{mean + 0.5 * root.real(), p.kappa_f / 2.0 - root.imag()};
    HybridizedMode minus{mean - 0.5 * root.real(), p.kappa_f / 2.0 + root.imag()};
    return {plus, minus};
}

static std::complex<double> s11(const BareResonatorFilterParams& p, double omega, double omega_rb) {
    const std::complex<double> i(0.0, 1.0);
    const std::complex<double> denom =
        (std::complex<double>(omega - p.omega_f_bare, 0.0) - i * (p.kappa_f / 2.0)) * (omega - omega_rb) +
        p.J * p.J;
    return std::cos(p.theta) + std::exp(i * p.theta) * (i * p.kappa_f * (omega - omega_rb)) / denom;
}

std::vector<std::complex<double>> reflection_ratio(const BareResonatorFilterParams& p,
                                                   const std::vector<double>& omega_grid) {
    p.validate();
    std::vector<std::complex<double>> out;
    out.reserve(omega_grid.size());
    for (double w : omega_grid)
        out.push_back(s11(p, w, p.omega_r_bare) / s11(p, w, p.omega_r_bare + p.chi));
    return out;
}

double effective_coupling(const DeviceParams& d, double Omega_d) {
    const double det = d.omega_r - d.omega_ge;
    return d.g_qr * d.alpha * Omega_d / (std::sqrt(2.0) * det * (det - d.alpha));
}

double transduce(const DeviceParams& d, double vd) {
    if (vd < 0.0) throw std::runtime_error("device: drive amplitude must be >= 0 V");
    return d.transduction_k * vd;
}

double stark_detuning(const DeviceParams& d, double Omega_d) {
    return d.stark_f0 * Omega_d * Omega_d;
}

DeviceParams default_device() {
    DeviceParams d{};
    d.omega_ge = mhz(8025.9);
    d.alpha = mhz(-318.5);
    d.omega_r = mhz(10306.0);
    d.kappa = mhz(53.3);
    d.g_qr = mhz(201.19);          // pinned so 1.2 V gives |g_eff|/2pi ~ 13 MHz
    d.chi = mhz(-4.5);
    d.transduction_k = mhz(1700.0 / 1.2);  // rad/us per volt: 1.2 V <-> 1.7 GHz drive
    // -2.77 MHz per GHz^2 of drive strength, converted to (rad/us)^-1.
    d.stark_f0 = -2.77 / (two_pi * 1e6);
    d.validate();
    return d;
}

BareResonatorFilterParams default_bare_modes() {
    BareResonatorFilterParams p{};
    p.omega_r_bare = mhz(10287.0);
    p.omega_f_bare = mhz(10179.0);
    p.J = mhz(84.1);
    p.kappa_f = mhz(400.0);
    p.chi = mhz(-4.5);
    p.theta = 0.0;
    p.validate();
    return p;
}

}  // namespace photonsim
