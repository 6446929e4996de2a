#pragma once

#include <complex>

namespace photonsim {

// Fabrication-spread model for a network of fixed-frequency device pairs.
struct NetworkSpec {
    int n_pairs = 1;             // number of communicating pairs
    double sigma = 0.0;          // resonator-frequency standard deviation (rad/us)
    double delta_tunable = 0.0;  // per-device tunable range (rad/us)
    double gamma_ph = 0.0;       // photon shape rate (rad/us)
};

// erf to ~1e-12 absolute, Maclaurin series for small arguments and a Lentz
// continued fraction for the complementary function at large ones. Kept
// self-contained so the probability model does not silently inherit libm
// behavior differences.
double erf_precise(double x);

// Probability that all pairs can be frequency-matched:
// P = erf(delta_tunable / (2 sigma))^n_pairs.
double matching_probability(const NetworkSpec& spec);

// Largest sigma for which matching_probability still reaches p_min, solved by
// bisection on the erf argument (so scaling delta_tunable scales the result
// exactly).
double max_sigma(int n_pairs, double delta_tunable, double p_min);

// Overlap of two sech^2 photon envelopes detuned by delta_omega:
// I = integral |psi(t)|^2 e^{-i delta_omega t} dt, quadrature over a window
// wide enough for 1e-12 tails. Cross-checked internally against the closed
// form x/sinh(x), x = pi delta_omega / (2 gamma_ph); the quadrature value is
// returned.
std::complex<double> mode_overlap(double delta_omega, double gamma_ph);

// Largest detuning keeping |mode_overlap| >= 0.99 (about 0.16 gamma_ph),
// located by bisection.
double fixed_frequency_budget(double gamma_ph);

}  // namespace photonsim
