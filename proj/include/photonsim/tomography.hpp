#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "photonsim/dynamics.hpp"
#include "photonsim/shaper.hpp"

namespace photonsim {

// Two-level photonic density matrix in the {|0>,|1>} number basis.
// rho01 stores <0|rho|1>, so <a> = conj(rho01) and the Bloch components are
// x = 2 Re rho01, y = -2 Im rho01, z = rho00 - rho11. Positivity is not
// enforced anywhere; statistically reconstructed matrices may be unphysical.
struct PhotonDensityMatrix {
    double rho00 = 1.0;
    double rho11 = 0.0;
    cplx rho01{0.0, 0.0};

    double pauli_x() const { return 2.0 * rho01.real(); }
    double pauli_y() const { return -2.0 * rho01.imag(); }
    double pauli_z() const { return rho00 - rho11; }
    double trace() const { return rho00 + rho11; }
};

struct QuadratureSamples {
    double theta = 0.0;  // measured quadrature angle, rad
    double eta = 1.0;    // detection efficiency in (0, 1]
    std::vector<double> values;
};

struct PauliTransferMatrix {
    std::array<std::array<double, 4>, 4> r{};  // row-major, basis (I, X, Y, Z)
    double trace() const { return r[0][0] + r[1][1] + r[2][2] + r[3][3]; }
};

struct ProcessTomographyResult {
    PauliTransferMatrix ptm;
    double process_fidelity = 0.0;
};

struct FourthMomentResult {
    double measured = 0.0;  // raw-moment combination, before efficiency scaling
    double value = 0.0;     // eta^2 * measured
    double bound = 0.0;     // two-photon population bound, value/2
};

// Project the simulated emission onto the target temporal mode. w must be the
// waveform of a coherent-initial-state run (|f0> amplitude 1/2), which is
// doubled internally to recover the per-unit-excitation emission; it is
// demodulated at omega_mode before the overlap c = integral psi_target psi_out
// dt (target unit-normalized). For a qubit prepared in beta|g> + gamma_f|f>
// the photonic state is rho11 = |gamma_f|^2 |c|^2, rho01 = beta conj(gamma_f)
// conj(c), rho00 = 1 - rho11: |c| < 1 encodes the shaping error.
PhotonDensityMatrix mode_project(const PhotonWaveform& w, const TargetWaveform& target,
                                 cplx beta, cplx gamma_f, double omega_mode);

// Draw n outcomes of the quadrature q_theta on rho after a loss channel of
// efficiency eta (rho11 -> eta rho11, rho01 -> sqrt(eta) rho01), by
// inverse-CDF lookup of p_theta(q) on a fixed 4096-point grid over [-6, 6].
// Deterministic for a given seed.
QuadratureSamples sample_quadratures(const PhotonDensityMatrix& rho, double theta, double eta,
                                     std::size_t n, std::uint64_t seed);

// Moment-based reconstruction from the theta = 0 and theta = pi/2 sample sets:
// loss-invert the raw moments (<q> /= sqrt(eta); <q^2> -> (<q^2> - (1-eta)/2)/eta),
// then c_x = sqrt(2)<q_0>, c_y = sqrt(2)<q_pi/2>, c_z = 2 - <q_0^2> - <q_pi/2^2>
// and rho = (I + c_x X + c_y Y + c_z Z)/2. No positivity projection.
PhotonDensityMatrix reconstruct(const QuadratureSamples& q0, const QuadratureSamples& q90);

// F = <psi|rho|psi> for the pure target a0|0> + a1|1>. Linear in rho; can
// exceed 1 for unphysical rho.
double state_fidelity(const PhotonDensityMatrix& rho, cplx a0, cplx a1);

// Least-squares Pauli transfer matrix from (input, output) state pairs
// (at least four linearly independent inputs; the canonical six preparations
// qualify). Process fidelity against the identity channel:
// F_p = (Tr R + d) / (d + d^2) with d = 2.
ProcessTomographyResult process_tomography(
    const std::vector<std::pair<PhotonDensityMatrix, PhotonDensityMatrix>>& in_out);

// Normally-ordered fourth moment <a+ a+ a a> from quadrature samples at the
// four angles {0, pi/4, pi/2, 3pi/4}:
//   measured = 1/2 + sum_theta (<q^4>/6 - <q^2>/2),
// value = eta^2 * measured, bound (two-photon population) = value/2.
// Vanishes identically for any state confined to the {|0>,|1>} subspace.
FourthMomentResult fourth_moment(const std::vector<QuadratureSamples>& sets);

// W(x,p) = (1/pi) e^{-(x^2+p^2)} [rho00 + rho11 (2(x^2+p^2) - 1)
//          + 2 sqrt(2) (x Re<a> + p Im<a>)], <a> = conj(rho01).
// Rows indexed by p_grid, columns by x_grid. Integrates to the trace.
std::vector<std::vector<double>> wigner(const PhotonDensityMatrix& rho,
                                        const std::vector<double>& x_grid,
                                        const std::vector<double>& p_grid);

}  // namespace photonsim
