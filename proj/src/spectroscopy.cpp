#include "photonsim/spectroscopy.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <mutex>
#include <stdexcept>

#include <Eigen/Dense>

#include "json.hpp"

#include "photonsim/parallel.hpp"
#include "photonsim/units.hpp"

namespace photonsim {

namespace {

double eval_even_poly(const std::array<double, 6>& c, double vd) {
    const double x = vd * vd;
    double acc = 0.0;
    for (int k = 5; k >= 0; --k) acc = acc * x + c[static_cast<std::size_t>(k)];
    return acc;
}

}  // namespace

double CalibrationTable::gamma_eval(double vd) const { return eval_even_poly(gamma_coeffs, vd); }

double CalibrationTable::omegad_eval(double vd) const { return eval_even_poly(omegad_coeffs, vd); }

double CalibrationTable::invert_gamma(double gamma) const {
    if (!(gamma >= 0.0)) throw std::invalid_argument("invert_gamma: rate must be non-negative");
    if (gamma == 0.0) return 0.0;
    const double gmax = gamma_max();
    if (gamma > gmax) {
        throw std::runtime_error("invert_gamma: requested rate " + std::to_string(to_mhz(gamma)) +
                                 " MHz exceeds calibrated maximum " + std::to_string(to_mhz(gmax)) +
                                 " MHz");
    }
    double lo = 0.0, hi = vd_mono_max;
    for (int it = 0; it < 200 && (hi - lo) > 1e-6 * vd_mono_max; ++it) {
        const double mid = 0.5 * (lo + hi);
        (gamma_eval(mid) < gamma ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::string CalibrationTable::to_json_string() const {
    nlohmann::json j;
    j["target_omega_ph_mhz"] = to_mhz(target_omega_ph);
    j["gamma_coeffs_mhz_per_v2k"] = nlohmann::json::array();
    j["omegad_coeffs_mhz_per_v2k"] = nlohmann::json::array();
    for (double c : gamma_coeffs) j["gamma_coeffs_mhz_per_v2k"].push_back(to_mhz(c));
    for (double c : omegad_coeffs) j["omegad_coeffs_mhz_per_v2k"].push_back(to_mhz(c));
    j["vd_max_v"] = vd_max;
    j["vd_mono_max_v"] = vd_mono_max;
    return j.dump(2);
}

CalibrationTable CalibrationTable::from_json_string(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    CalibrationTable t;
    t.target_omega_ph = mhz(j.at("target_omega_ph_mhz").get<double>());
    const auto& gc = j.at("gamma_coeffs_mhz_per_v2k");
    const auto& wc = j.at("omegad_coeffs_mhz_per_v2k");
    if (gc.size() != 6 || wc.size() != 6)
        throw std::runtime_error("calibration table: expected 6 coefficients per map");
    for (std::size_t k = 0; k < 6; ++k) {
        t.gamma_coeffs[k] = mhz(gc[k].get<double>());
        t.omegad_coeffs[k] = mhz(wc[k].get<double>());
    }
    t.vd_max = j.at("vd_max_v").get<double>();
    t.vd_mono_max = j.at("vd_mono_max_v").get<double>();
    return t;
}

std::pair<double, double> fit_envelope(const PhotonWaveform& w, double discard) {
    const std::size_t n = w.samples.size();
    if (n < 2) throw std::invalid_argument("fit_envelope: waveform too short");
    std::vector<double> mag(n);
    double peak = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        mag[k] = std::abs(w.samples[k]);
        peak = std::max(peak, mag[k]);
    }
    if (peak <= 0.0) throw std::runtime_error("fit_envelope: waveform is identically zero");
    const double floor_level = 1e-5 * peak;

    const auto k0 = static_cast<std::size_t>(std::max(0.0, std::ceil(discard / w.dt - 1e-9)));
    std::vector<std::size_t> idx;
    for (std::size_t k = k0; k < n; ++k) {
        if (mag[k] <= floor_level) break;  // entering the trailing noise floor
        idx.push_back(k);
    }
    if (idx.size() < 8)
        throw std::runtime_error("fit_envelope: window after discard is below the noise floor");
    for (std::size_t i = 0; i + 1 < idx.size(); ++i) {
        if (mag[idx[i + 1]] > 1.05 * mag[idx[i]])
            throw std::runtime_error("fit_envelope: envelope is not monotone (oscillatory regime)");
    }

    // closed-form least squares of log|w| against t
    double st = 0.0, sy = 0.0;
    for (std::size_t k : idx) {
        st += w.dt * static_cast<double>(k);
        sy += std::log(mag[k]);
    }
    const auto m = static_cast<double>(idx.size());
    const double tbar = st / m, ybar = sy / m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k : idx) {
        const double dx = w.dt * static_cast<double>(k) - tbar;
        sxx += dx * dx;
        sxy += dx * (std::log(mag[k]) - ybar);
    }
    const double slope = sxy / sxx;
    double ss = 0.0;
    for (std::size_t k : idx) {
        const double r =
            std::log(mag[k]) - (ybar + slope * (w.dt * static_cast<double>(k) - tbar));
        ss += r * r;
    }
    return {-slope, std::sqrt(ss / m)};
}

double extract_frequency(const PhotonWaveform& w) {
    const std::size_t n = w.samples.size();
    if (n < 8) throw std::invalid_argument("extract_frequency: waveform too short");
    if (w.peak_abs() <= 0.0)
        throw std::runtime_error("extract_frequency: waveform is identically zero");

    std::size_t base = 1;
    while (base < n) base <<= 1;
    const std::size_t N = 8 * base;

    static std::mutex plan_mutex;  // FFTW planning is not thread-safe
    auto* in = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * N));
    auto* out = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * N));
    if (!in || !out) {
        fftw_free(in);
        fftw_free(out);
        throw std::bad_alloc();
    }
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        plan = fftw_plan_dft_1d(static_cast<int>(N), in, out, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    for (std::size_t k = 0; k < N; ++k) {
        in[k][0] = k < n ? w.samples[k].real() : 0.0;
        in[k][1] = k < n ? w.samples[k].imag() : 0.0;
    }
    fftw_execute(plan);
    std::vector<double> mag(N);
    for (std::size_t k = 0; k < N; ++k) mag[k] = std::hypot(out[k][0], out[k][1]);
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        fftw_destroy_plan(plan);
    }
    fftw_free(in);
    fftw_free(out);

    std::size_t jstar = 0;
    for (std::size_t k = 1; k < N; ++k)
        if (mag[k] > mag[jstar]) jstar = k;

    // Reject spectra with a second comparable line outside the main lobe.
    const auto guard = static_cast<std::size_t>(3 * N / n);
    for (std::size_t k = 0; k < N; ++k) {
        const double prev = mag[(k + N - 1) % N], next = mag[(k + 1) % N];
        if (!(mag[k] >= prev && mag[k] >= next)) continue;
        std::size_t dist = k > jstar ? k - jstar : jstar - k;
        dist = std::min(dist, N - dist);
        if (dist > guard && mag[k] >= 0.5 * mag[jstar])
            throw std::runtime_error("extract_frequency: two comparable spectral peaks");
    }

    // quadratic refinement on the log-magnitude of the three bins at the peak
    const double lc = std::log(mag[jstar]);
    const double lm = std::log(std::max(mag[(jstar + N - 1) % N], 1e-300));
    const double lp = std::log(std::max(mag[(jstar + 1) % N], 1e-300));
    const double denom = lm - 2.0 * lc + lp;
    double delta = 0.0;
    if (std::abs(denom) > 1e-12 * std::abs(lc)) delta = 0.5 * (lm - lp) / denom;
    delta = std::clamp(delta, -0.5, 0.5);

    double fidx = static_cast<double>(jstar) + delta;
    if (fidx > static_cast<double>(N) / 2.0) fidx -= static_cast<double>(N);
    const double f_cyc = fidx / (static_cast<double>(N) * w.dt);
    return w.frame_freq - two_pi * f_cyc;
}

std::vector<SweepRecord> run_sweep(const DeviceParams& d, const std::vector<double>& vd_grid,
                                   const std::vector<double>& omega_d_grid, double pulse_len,
                                   double dt_int, int workers) {
    d.validate();
    if (vd_grid.empty() || omega_d_grid.empty())
        throw std::invalid_argument("run_sweep: sweep grid is empty");
    if (!(pulse_len > 0.0)) throw std::invalid_argument("run_sweep: pulse_len must be positive");

    const double pulse_dt = 1e-3;
    const auto npts = static_cast<std::size_t>(std::llround(pulse_len / pulse_dt)) + 1;
    const std::size_t nw = omega_d_grid.size();
    const std::size_t total = vd_grid.size() * nw;
    const double discard = 10.0 / d.kappa;

    std::vector<SweepRecord> records(total);
    parallel_for(total, workers, [&](std::size_t i) {
        const double vd = vd_grid[i / nw];
        const double wd = omega_d_grid[i % nw];
        SweepRecord rec;
        rec.vd = vd;
        rec.omega_d = wd;
        const double g = effective_coupling(d, transduce(d, vd));
        rec.oscillatory = std::abs(g) > 0.25 * d.kappa;
        if (!rec.oscillatory) {
            DrivePulse p;
            p.t0 = 0.0;
            p.dt = pulse_dt;
            p.vd.assign(npts, vd);
            p.omega_d.assign(npts, wd);
            p.phase_offset.assign(npts, 0.0);
            ThreeLevelState init;
            init.rho_f0f0 = 0.5;
            init.rho_g0g0 = 0.5;
            init.rho_f0g0 = cplx(0.5, 0.0);
            const IntegrationResult res = integrate(d, p, init, dt_int);
            if (res.waveform.energy() >= 1e-24) {
                const auto [gm, rms] = fit_envelope(res.waveform, discard);
                rec.gamma_f = adiabatic_rate_from_envelope(gm);
                rec.omega_ph = extract_frequency(res.waveform);
                rec.fit_residual = rms;
            }
        }
        records[i] = rec;
    });
    return records;
}

CalibrationTable build_table(const std::vector<SweepRecord>& records, double target_omega_ph,
                             double tolerance) {
    if (!(tolerance > 0.0)) throw std::invalid_argument("build_table: tolerance must be positive");
    struct Row {
        double vd, wd, gm;
    };
    std::vector<Row> rows;
    std::size_t i = 0;
    while (i < records.size()) {
        std::size_t j = i;
        while (j < records.size() && records[j].vd == records[i].vd) ++j;
        std::vector<const SweepRecord*> pts;
        for (std::size_t k = i; k < j; ++k) {
            if (!records[k].oscillatory && records[k].omega_ph != 0.0) pts.push_back(&records[k]);
        }
        std::sort(pts.begin(), pts.end(),
                  [](const SweepRecord* a, const SweepRecord* b) { return a->omega_d < b->omega_d; });
        for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
            const double da = pts[k]->omega_ph - target_omega_ph;
            const double db = pts[k + 1]->omega_ph - target_omega_ph;
            if (da == 0.0) {
                rows.push_back({records[i].vd, pts[k]->omega_d, pts[k]->gamma_f});
                break;
            }
            if (da * db < 0.0 &&
                std::abs(pts[k + 1]->omega_ph - pts[k]->omega_ph) <= tolerance) {
                const double s = da / (da - db);
                rows.push_back({records[i].vd,
                                pts[k]->omega_d + s * (pts[k + 1]->omega_d - pts[k]->omega_d),
                                pts[k]->gamma_f + s * (pts[k + 1]->gamma_f - pts[k]->gamma_f)});
                break;
            }
        }
        i = j;
    }
    if (rows.size() < 6) {
        throw std::runtime_error(
            "build_table: only " + std::to_string(rows.size()) +
            " amplitude rows cross the target frequency; need at least 6 (widen the sweep)");
    }

    CalibrationTable t;
    t.target_omega_ph = target_omega_ph;
    const auto m = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd Ag(m, 5), Aw(m, 6);
    Eigen::VectorXd bg(m), bw(m);
    for (Eigen::Index r = 0; r < m; ++r) {
        const double x = rows[static_cast<std::size_t>(r)].vd * rows[static_cast<std::size_t>(r)].vd;
        double xp = 1.0;
        for (Eigen::Index c = 0; c < 6; ++c) {
            Aw(r, c) = xp;
            xp *= x;
            if (c < 5) Ag(r, c) = xp;  // powers x^1..x^5: no constant term in the rate map
        }
        bg(r) = rows[static_cast<std::size_t>(r)].gm;
        bw(r) = rows[static_cast<std::size_t>(r)].wd;
        t.vd_max = std::max(t.vd_max, rows[static_cast<std::size_t>(r)].vd);
    }
    const Eigen::VectorXd cg = Ag.colPivHouseholderQr().solve(bg);
    const Eigen::VectorXd cw = Aw.colPivHouseholderQr().solve(bw);
    t.gamma_coeffs[0] = 0.0;
    for (std::size_t k = 0; k < 5; ++k) t.gamma_coeffs[k + 1] = cg(static_cast<Eigen::Index>(k));
    for (std::size_t k = 0; k < 6; ++k) t.omegad_coeffs[k] = cw(static_cast<Eigen::Index>(k));

    // largest prefix of the domain on which the fitted rate is strictly increasing
    t.vd_mono_max = t.vd_max;
    const int scan = 2048;
    double prev = t.gamma_eval(0.0);
    for (int k = 1; k <= scan; ++k) {
        const double v = t.vd_max * static_cast<double>(k) / scan;
        const double cur = t.gamma_eval(v);
        if (cur <= prev) {
            t.vd_mono_max = t.vd_max * static_cast<double>(k - 1) / scan;
            break;
        }
        prev = cur;
    }
    return t;
}

}  // namespace photonsim
