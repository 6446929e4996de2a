#include "photonsim/tomography.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include "photonsim/units.hpp"

namespace photonsim {

namespace {

constexpr std::size_t cdf_points = 4096;
constexpr double q_lo = -6.0, q_hi = 6.0;

void check_state(const PhotonDensityMatrix& rho) {
    if (std::abs(rho.trace() - 1.0) > 1e-6)
        throw std::invalid_argument("quadrature sampling: density matrix trace must be 1");
}

double mean_of(const std::vector<double>& v, int power) {
    double acc = 0.0;
    for (double x : v) {
        double t = x;
        for (int p = 1; p < power; ++p) t *= x;
        acc += t;
    }
    return acc / static_cast<double>(v.size());
}

}  // namespace

PhotonDensityMatrix mode_project(const PhotonWaveform& w, const TargetWaveform& target,
                                 cplx beta, cplx gamma_f, double omega_mode) {
    const double te = target.energy();
    if (std::abs(te - 1.0) > 0.2)
        throw std::invalid_argument("mode_project: target waveform is not normalized");
    const double scale = 1.0 / std::sqrt(te);

    // Demodulated per-unit-excitation emission: the coherent run prepares the
    // emitting coherence at amplitude 1/2.
    const std::vector<cplx> psi = demodulate(w, omega_mode);
    cplx c{0.0, 0.0};
    for (std::size_t k = 0; k < psi.size(); ++k) {
        const double t = w.t0 + w.dt * static_cast<double>(k);
        const double weight = (k == 0 || k + 1 == psi.size()) ? 0.5 : 1.0;
        c += weight * target.sample_at(t) * scale * 2.0 * psi[k] * w.dt;
    }

    PhotonDensityMatrix rho;
    rho.rho11 = std::norm(gamma_f) * std::norm(c);
    rho.rho00 = 1.0 - rho.rho11;
    rho.rho01 = beta * std::conj(gamma_f) * std::conj(c);
    return rho;
}

QuadratureSamples sample_quadratures(const PhotonDensityMatrix& rho, double theta, double eta,
                                     std::size_t n, std::uint64_t seed) {
    if (!(eta > 0.0 && eta <= 1.0))
        throw std::invalid_argument("sample_quadratures: eta must lie in (0, 1]");
    if (n < 1) throw std::invalid_argument("sample_quadratures: need at least one draw");
    check_state(rho);

    // loss channel
    const double r11 = eta * rho.rho11;
    const double r00 = 1.0 - r11;
    const cplx r01 = std::sqrt(eta) * rho.rho01;
    const double cross = 2.0 * (r01 * std::polar(1.0, theta)).real();

    // p_theta(q) = phi0^2 (r00 + 2 q^2 r11 + 2 sqrt(2) q cross/2) with
    // phi0^2 = exp(-q^2)/sqrt(pi); clamped at zero for unphysical inputs.
    std::array<double, cdf_points> q{}, cdf{};
    const double dq = (q_hi - q_lo) / static_cast<double>(cdf_points - 1);
    double prev_p = 0.0, acc = 0.0;
    for (std::size_t i = 0; i < cdf_points; ++i) {
        q[i] = q_lo + dq * static_cast<double>(i);
        const double phi02 = std::exp(-q[i] * q[i]) / std::sqrt(pi_val);
        double p = phi02 * (r00 + 2.0 * q[i] * q[i] * r11 +
                            std::sqrt(2.0) * q[i] * cross);
        p = std::max(p, 0.0);
        if (i > 0) acc += 0.5 * (prev_p + p) * dq;
        cdf[i] = acc;
        prev_p = p;
    }
    if (!(acc > 0.0)) throw std::runtime_error("sample_quadratures: degenerate distribution");

    QuadratureSamples out;
    out.theta = theta;
    out.eta = eta;
    out.values.resize(n);
    std::mt19937_64 gen(seed);
    for (std::size_t k = 0; k < n; ++k) {
        const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        const double target = u * acc;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
        if (it == cdf.begin()) {
            out.values[k] = q_lo;
            continue;
        }
        const auto i = static_cast<std::size_t>(it - cdf.begin());
        if (i >= cdf_points) {
            out.values[k] = q_hi;
            continue;
        }
        const double seg = cdf[i] - cdf[i - 1];
        const double f = seg > 0.0 ? (target - cdf[i - 1]) / seg : 1.0;
        out.values[k] = q[i - 1] + f * dq;
    }
    return out;
}

PhotonDensityMatrix reconstruct(const QuadratureSamples& q0, const QuadratureSamples& q90) {
    if (q0.values.empty() || q90.values.empty())
        throw std::invalid_argument("reconstruct: empty sample set");
    if (std::abs(q0.theta) > 1e-9 || std::abs(q90.theta - 0.5 * pi_val) > 1e-9)
        throw std::invalid_argument("reconstruct: expected theta = 0 and theta = pi/2 sets");
    if (q0.eta != q90.eta)
        throw std::invalid_argument("reconstruct: the two sets must share eta");
    const double eta = q0.eta;
    if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("reconstruct: invalid eta");

    const double m1_0 = mean_of(q0.values, 1) / std::sqrt(eta);
    const double m1_90 = mean_of(q90.values, 1) / std::sqrt(eta);
    const double m2_0 = (mean_of(q0.values, 2) - 0.5 * (1.0 - eta)) / eta;
    const double m2_90 = (mean_of(q90.values, 2) - 0.5 * (1.0 - eta)) / eta;

    const double cx = std::sqrt(2.0) * m1_0;
    const double cy = std::sqrt(2.0) * m1_90;
    const double cz = 2.0 - m2_0 - m2_90;

    PhotonDensityMatrix rho;
    rho.rho00 = 0.5 * (1.0 + cz);
    rho.rho11 = 0.5 * (1.0 - cz);
    rho.rho01 = 0.5 * cplx(cx, -cy);
    return rho;
}

double state_fidelity(const PhotonDensityMatrix& rho, cplx a0, cplx a1) {
    const double norm = std::norm(a0) + std::norm(a1);
    if (std::abs(norm - 1.0) > 1e-6)
        throw std::invalid_argument("state_fidelity: target state must be normalized");
    return std::norm(a0) * rho.rho00 + std::norm(a1) * rho.rho11 +
           2.0 * (std::conj(a0) * a1 * rho.rho01).real();
}

ProcessTomographyResult process_tomography(
    const std::vector<std::pair<PhotonDensityMatrix, PhotonDensityMatrix>>& in_out) {
    const auto m = static_cast<Eigen::Index>(in_out.size());
    if (m < 4)
        throw std::invalid_argument("process_tomography: need at least four preparations");
    Eigen::MatrixXd A(4, m), B(4, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const auto& [in, out] = in_out[static_cast<std::size_t>(j)];
        A(0, j) = in.trace();
        A(1, j) = in.pauli_x();
        A(2, j) = in.pauli_y();
        A(3, j) = in.pauli_z();
        B(0, j) = out.trace();
        B(1, j) = out.pauli_x();
        B(2, j) = out.pauli_y();
        B(3, j) = out.pauli_z();
    }
    const Eigen::Matrix4d gram = A * A.transpose();
    const Eigen::FullPivLU<Eigen::Matrix4d> lu(gram);
    if (!lu.isInvertible())
        throw std::runtime_error("process_tomography: degenerate preparation set");
    const Eigen::Matrix4d R = B * A.transpose() * lu.inverse();

    ProcessTomographyResult res;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            res.ptm.r[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = R(r, c);
    res.process_fidelity = (res.ptm.trace() + 2.0) / 6.0;
    return res;
}

FourthMomentResult fourth_moment(const std::vector<QuadratureSamples>& sets) {
    if (sets.size() != 4)
        throw std::invalid_argument("fourth_moment: need the four phase sets 0, pi/4, pi/2, 3pi/4");
    std::vector<const QuadratureSamples*> ordered(4, nullptr);
    for (const auto& s : sets) {
        if (s.values.empty()) throw std::invalid_argument("fourth_moment: empty sample set");
        bool placed = false;
        for (int k = 0; k < 4; ++k) {
            if (std::abs(s.theta - 0.25 * pi_val * k) < 1e-9) {
                ordered[static_cast<std::size_t>(k)] = &s;
                placed = true;
                break;
            }
        }
        if (!placed)
            throw std::invalid_argument("fourth_moment: unexpected quadrature angle");
    }
    const double eta = sets.front().eta;
    FourthMomentResult res;
    res.measured = 0.5;
    for (const auto* s : ordered) {
        if (!s) throw std::invalid_argument("fourth_moment: missing phase set");
        if (s->eta != eta)
            throw std::invalid_argument("fourth_moment: all sets must share eta");
        res.measured += mean_of(s->values, 4) / 6.0 - mean_of(s->values, 2) / 2.0;
    }
    res.value = eta * eta * res.measured;
    res.bound = 0.5 * res.value;
    return res;
}

std::vector<std::vector<double>> wigner(const PhotonDensityMatrix& rho,
                                        const std::vector<double>& x_grid,
                                        const std::vector<double>& p_grid) {
    const cplx a_mean = std::conj(rho.rho01);
    std::vector<std::vector<double>> field(p_grid.size(), std::vector<double>(x_grid.size()));
    for (std::size_t ip = 0; ip < p_grid.size(); ++ip) {
        const double p = p_grid[ip];
        for (std::size_t ix = 0; ix < x_grid.size(); ++ix) {
            const double x = x_grid[ix];
            const double r2 = x * x + p * p;
            field[ip][ix] = std::exp(-r2) / pi_val *
                            (rho.rho00 + rho.rho11 * (2.0 * r2 - 1.0) +
                             2.0 * std::sqrt(2.0) * (x * a_mean.real() + p * a_mean.imag()));
        }
    }
    return field;
}

}  // namespace photonsim
