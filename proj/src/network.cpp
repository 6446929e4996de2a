#include "photonsim/network.hpp"

#include <cmath>
#include <stdexcept>

#include "photonsim/units.hpp"

namespace photonsim {

namespace {

// sqrt(pi) e^{x^2} erfc(x) as the continued fraction x + K(n/2 / x),
// evaluated by the modified Lentz algorithm. Valid for x >= 1.
double erfc_cf_tail(double x) {
    const double tiny = 1e-300;
    double f = x, c = x, d = 0.0;
    for (int n = 1; n < 400; ++n) {
        const double a = 0.5 * n;
        d = x + a * d;
        if (d == 0.0) d = tiny;
        d = 1.0 / d;
        c = x + a / c;
        if (c == 0.0) c = tiny;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-17) break;
    }
    return f;
}

}  // namespace

double erf_precise(double x) {
    if (std::isnan(x)) return x;
    const double ax = std::abs(x);
    double v;
    if (ax < 2.0) {
        // 2/sqrt(pi) * sum (-1)^n x^(2n+1) / (n! (2n+1))
        double term = ax, sum = ax;
        for (int n = 1; n < 200; ++n) {
            term *= -ax * ax / static_cast<double>(n);
            const double add = term / static_cast<double>(2 * n + 1);
            sum += add;
            if (std::abs(add) < 1e-18 * std::abs(sum)) break;
        }
        v = 2.0 / std::sqrt(pi_val) * sum;
    } else if (ax > 6.5) {
        v = 1.0;  // erfc < 3e-20, below double resolution of 1 - erfc
    } else {
        const double erfc = std::exp(-ax * ax) / (std::sqrt(pi_val) * erfc_cf_tail(ax));
        v = 1.0 - erfc;
    }
    return x < 0.0 ? -v : v;
}

double matching_probability(const NetworkSpec& spec) {
    if (spec.n_pairs < 1)
        throw std::invalid_argument("matching_probability: need at least one pair");
    if (!(spec.sigma > 0.0))
        throw std::invalid_argument("matching_probability: sigma must be positive");
    if (!(spec.delta_tunable >= 0.0))
        throw std::invalid_argument("matching_probability: negative tunable range");
    const double per_pair = erf_precise(spec.delta_tunable / (2.0 * spec.sigma));
    return std::pow(per_pair, static_cast<double>(spec.n_pairs));
}

double max_sigma(int n_pairs, double delta_tunable, double p_min) {
    if (n_pairs < 1) throw std::invalid_argument("max_sigma: need at least one pair");
    if (!(delta_tunable > 0.0))
        throw std::invalid_argument("max_sigma: tunable range must be positive");
    if (!(p_min > 0.0 && p_min < 1.0))
        throw std::invalid_argument("max_sigma: p_min must lie in (0, 1)");

    // Solve erf(u)^N = p_min for the argument u; sigma = delta/(2u) then
    // scales exactly with delta_tunable.
    const double n = static_cast<double>(n_pairs);
    auto prob = [&](double u) { return std::pow(erf_precise(u), n); };
    double lo = 1e-8, hi = 8.0;
    if (prob(lo) >= p_min) return delta_tunable / (2.0 * lo);  // p_min ~ 0 edge
    for (int it = 0; it < 120; ++it) {
        const double mid = 0.5 * (lo + hi);
        (prob(mid) < p_min ? lo : hi) = mid;
    }
    const double u = 0.5 * (lo + hi);
    return delta_tunable / (2.0 * u);
}

std::complex<double> mode_overlap(double delta_omega, double gamma_ph) {
    if (!(gamma_ph > 0.0)) throw std::invalid_argument("mode_overlap: gamma_ph must be positive");
    const double half_window = 13.8 / gamma_ph;  // sech^2 tail below 1e-12
    const int n = 20001;
    const double h = 2.0 * half_window / static_cast<double>(n - 1);
    std::complex<double> acc{0.0, 0.0};
    for (int k = 0; k < n; ++k) {
        const double t = -half_window + h * static_cast<double>(k);
        const double sech = 1.0 / std::cosh(gamma_ph * t);
        const double w = (k == 0 || k == n - 1) ? 0.5 : 1.0;
        acc += w * (0.5 * gamma_ph * sech * sech) *
               std::complex<double>(std::cos(delta_omega * t), -std::sin(delta_omega * t));
    }
    acc *= h;

    const double x = 0.5 * pi_val * delta_omega / gamma_ph;
    const double closed = x == 0.0 ? 1.0 : x / std::sinh(x);
    if (std::abs(acc - std::complex<double>(closed, 0.0)) > 1e-9)
        throw std::logic_error("mode_overlap: quadrature disagrees with the closed form");
    return acc;
}

double fixed_frequency_budget(double gamma_ph) {
    if (!(gamma_ph > 0.0))
        throw std::invalid_argument("fixed_frequency_budget: gamma_ph must be positive");
    double lo = 0.0, hi = gamma_ph;  // |I(gamma_ph)| ~ 0.68 < 0.99
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (std::abs(mode_overlap(mid, gamma_ph)) >= 0.99 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace photonsim
