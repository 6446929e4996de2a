// photonctl: command-line front end for the shaped-photon emission toolkit.
// Subcommands: spectroscopy, design, emit, tomography, scaling, overlap.
// Every artifact is deterministic for a fixed config and seed.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "photonsim/device.hpp"
#include "photonsim/dynamics.hpp"
#include "photonsim/io.hpp"
#include "photonsim/network.hpp"
#include "photonsim/parallel.hpp"
#include "photonsim/shaper.hpp"
#include "photonsim/spectroscopy.hpp"
#include "photonsim/tomography.hpp"
#include "photonsim/units.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace photonsim;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 12345;
    int workers = 0;  // 0 -> hardware concurrency

    int effective_workers() const {
        if (workers > 0) return workers;
        const unsigned hc = std::thread::hardware_concurrency();
        return hc > 0 ? static_cast<int>(hc) : 1;
    }
};

// Collects artifacts for one command run and finishes with a metadata file
// recording the config hash and a content hash per artifact.
class ArtifactSink {
  public:
    ArtifactSink(std::string dir, std::string cmd, const RunConfig& cfg, std::uint64_t seed)
        : dir_(std::move(dir)), cmd_(std::move(cmd)), cfg_hash_(cfg.config_hash), seed_(seed) {
        fs::create_directories(dir_);
    }

    void write(const std::string& rel_name, const std::string& content) {
        const fs::path p = fs::path(dir_) / rel_name;
        fs::create_directories(p.parent_path());
        write_text_file(p.string(), content);
        records_.push_back({rel_name, hex64(fnv1a64(content))});
    }

    std::string provenance() const { return "config " + hex64(cfg_hash_); }

    void finish() {
        json meta;
        meta["command"] = cmd_;
        meta["config_hash"] = hex64(cfg_hash_);
        meta["seed"] = seed_;
        meta["artifacts"] = json::array();
        for (const auto& [name, hash] : records_)
            meta["artifacts"].push_back({{"file", name}, {"fnv64", hash}});
        const std::string text = meta.dump(2) + "\n";
        write_text_file((fs::path(dir_) / ("metadata_" + cmd_ + ".json")).string(), text);
    }

  private:
    std::string dir_, cmd_;
    std::uint64_t cfg_hash_, seed_;
    std::vector<std::pair<std::string, std::string>> records_;
};

std::string target_dir_name(double omega_ph) {
    return "design_" + std::to_string(std::llround(to_mhz(omega_ph)));
}

ThreeLevelState coherent_init() {
    ThreeLevelState s;
    s.rho_f0f0 = 0.5;
    s.rho_g0g0 = 0.5;
    s.rho_f0g0 = cplx(0.5, 0.0);
    return s;
}

std::vector<std::vector<double>> read_csv_numeric(const std::string& path,
                                                  std::vector<std::string>& header) {
    const std::string text = read_text_file(path);
    std::vector<std::vector<double>> rows;
    header.clear();
    std::size_t pos = 0;
    bool first = true;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string line = text.substr(pos, eol - pos);
        pos = eol + 1;
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t c = 0;
        while (true) {
            const std::size_t comma = line.find(',', c);
            cells.push_back(line.substr(c, comma == std::string::npos ? comma : comma - c));
            if (comma == std::string::npos) break;
            c = comma + 1;
        }
        if (first) {
            header = cells;
            first = false;
            continue;
        }
        std::vector<double> vals;
        vals.reserve(cells.size());
        for (const auto& cell : cells) vals.push_back(std::strtod(cell.c_str(), nullptr));
        rows.push_back(std::move(vals));
    }
    return rows;
}

// ---- spectroscopy ----

std::vector<SweepRecord> sweep_from_config(const RunConfig& cfg, int workers) {
    if (cfg.sweep.vd_grid.empty() || cfg.sweep.omega_d_grid.empty())
        throw std::runtime_error("config: sweep grids must be nonempty (sweep.vd_grid_v / "
                                 "sweep.omega_d_grid_mhz)");
    return run_sweep(cfg.device, cfg.sweep.vd_grid, cfg.sweep.omega_d_grid, cfg.sweep.pulse_len,
                     cfg.sweep.dt_int, workers);
}

std::string sweep_csv(const std::vector<SweepRecord>& records) {
    CsvWriter csv({"vd_v", "omega_d_mhz", "gamma_f_mhz", "omega_ph_mhz", "fit_residual",
                   "oscillatory"});
    for (const auto& r : records) {
        csv.add_row({format_double(r.vd), format_double(to_mhz(r.omega_d)),
                     format_double(to_mhz(r.gamma_f)), format_double(to_mhz(r.omega_ph)),
                     format_double(r.fit_residual), r.oscillatory ? "1" : "0"});
    }
    return csv.str();
}

int cmd_spectroscopy(const CommonOpts& opts) {
    const RunConfig cfg = load_config(opts.config_path);
    const int workers = opts.effective_workers();
    const std::vector<SweepRecord> records = sweep_from_config(cfg, workers);

    ArtifactSink sink(opts.out_dir, "spectroscopy", cfg, opts.seed);
    sink.write("sweep.csv", sweep_csv(records));

    // rate vs photon frequency, one series per amplitude, plus the
    // adiabatic-model overlay at the largest usable amplitude
    std::vector<PlotSeries> rate_series, freq_series;
    double overlay_vd = 0.0;
    for (std::size_t i = 0; i < records.size();) {
        std::size_t j = i;
        while (j < records.size() && records[j].vd == records[i].vd) ++j;
        PlotSeries rs, fsr;
        for (std::size_t k = i; k < j; ++k) {
            if (records[k].oscillatory || records[k].omega_ph == 0.0) continue;
            rs.x.push_back(to_mhz(records[k].omega_ph));
            rs.y.push_back(to_mhz(records[k].gamma_f));
            fsr.x.push_back(to_mhz(records[k].omega_d));
            fsr.y.push_back(to_mhz(records[k].omega_ph));
        }
        if (!rs.x.empty()) {
            char label[48];
            std::snprintf(label, sizeof label, "vd = %.3g V", records[i].vd);
            rs.label = label;
            rs.markers = true;
            rs.line = false;
            fsr.label = label;
            fsr.markers = true;
            fsr.line = false;
            rate_series.push_back(std::move(rs));
            freq_series.push_back(std::move(fsr));
            overlay_vd = std::max(overlay_vd, records[i].vd);
        }
        i = j;
    }
    if (overlay_vd > 0.0) {
        PlotSeries model;
        model.label = "adiabatic model";
        model.color = "#000000";
        const double g = effective_coupling(cfg.device, transduce(cfg.device, overlay_vd));
        for (int k = 0; k <= 200; ++k) {
            const double w = cfg.device.omega_r +
                             cfg.device.kappa * (-1.5 + 3.0 * static_cast<double>(k) / 200.0);
            model.x.push_back(to_mhz(w));
            model.y.push_back(to_mhz(emission_rate(cfg.device, g, w)));
        }
        rate_series.push_back(std::move(model));
    }
    PlotOptions rate_opt;
    rate_opt.title = "Emission rate vs photon frequency";
    rate_opt.xlabel = "photon frequency (MHz)";
    rate_opt.ylabel = "emission rate (MHz)";
    rate_opt.comment = sink.provenance();
    sink.write("spectroscopy_rate.svg", svg_plot(rate_series, rate_opt));

    PlotOptions freq_opt;
    freq_opt.title = "Photon frequency vs drive frequency";
    freq_opt.xlabel = "drive frequency (MHz)";
    freq_opt.ylabel = "photon frequency (MHz)";
    freq_opt.comment = sink.provenance();
    sink.write("spectroscopy_frequency.svg", svg_plot(freq_series, freq_opt));

    sink.finish();
    return 0;
}

// ---- design ----

struct DesignOutcome {
    CalibrationTable table;
    TargetWaveform target;
    FeasibilityReport feas;
    PhaseCorrectionResult corrected;
    PhotonWaveform wave_before, wave_after;
    double s_before = 0.0, s_after = 0.0;
    double overlap2_before = 0.0, overlap2_after = 0.0;
    double peak_err = 0.0;          // extracted - target, rad/us
    double emitted_energy_f0 = 0.0; // ledger of a pure-|f0> run
};

DesignOutcome design_target(const RunConfig& cfg, const std::vector<SweepRecord>& sweep,
                            double omega_target) {
    DesignOutcome out;
    out.table = build_table(sweep, omega_target, cfg.sweep.table_tolerance);
    out.target = sech_target(cfg.target.gamma_ph, cfg.target.epsilon_trunc);
    out.feas = check_feasibility(out.table, out.target);
    if (!out.feas.feasible) {
        char msg[192];
        std::snprintf(msg, sizeof msg,
                      "design infeasible at %.1f MHz: required peak rate %.3f MHz exceeds "
                      "calibrated maximum %.3f MHz (margin %.3f)",
                      to_mhz(omega_target), to_mhz(out.feas.required_rate),
                      to_mhz(out.feas.available_rate), out.feas.margin);
        throw std::runtime_error(msg);
    }
    const std::vector<double> rate = target_emission_rate(out.target);
    const std::vector<double> vd = invert_amplitude(out.table, rate);
    DrivePulse pulse = synthesize(out.table, vd, out.target.t0, out.target.dt);
    const double pad =
        std::max(cfg.target.tail_pad_min, cfg.target.tail_pad_frac * out.target.duration());
    pulse = extend_with_tail(pulse, pad);

    const IntegrationResult before =
        integrate(cfg.device, pulse, coherent_init(), cfg.sweep.dt_int);
    out.wave_before = before.waveform;
    out.s_before = time_symmetry(out.wave_before);
    out.overlap2_before =
        mode_project(out.wave_before, out.target, cplx(0.0, 0.0), cplx(1.0, 0.0), omega_target)
            .rho11;

    out.corrected =
        phase_correct(cfg.device, pulse, omega_target, cfg.target.correction_passes,
                      cfg.sweep.dt_int);
    const IntegrationResult after =
        integrate(cfg.device, out.corrected.pulse, coherent_init(), cfg.sweep.dt_int);
    out.wave_after = after.waveform;
    out.s_after = time_symmetry(out.wave_after);
    out.overlap2_after =
        mode_project(out.wave_after, out.target, cplx(0.0, 0.0), cplx(1.0, 0.0), omega_target)
            .rho11;
    out.peak_err = extract_frequency(out.wave_after) - omega_target;

    ThreeLevelState f0;
    f0.rho_f0f0 = 1.0;
    out.emitted_energy_f0 =
        integrate(cfg.device, out.corrected.pulse, f0, cfg.sweep.dt_int).trajectory.emitted_energy;
    return out;
}

json design_report(const RunConfig& cfg, double omega_target, const DesignOutcome& d) {
    json rep;
    rep["target_omega_ph_mhz"] = to_mhz(omega_target);
    rep["gamma_ph_mhz"] = to_mhz(cfg.target.gamma_ph);
    rep["feasibility"] = {{"feasible", d.feas.feasible},
                          {"margin", d.feas.margin},
                          {"required_rate_mhz", to_mhz(d.feas.required_rate)},
                          {"available_rate_mhz", to_mhz(d.feas.available_rate)},
                          {"limiting_vd_v", d.feas.limiting_vd}};
    rep["time_symmetry"] = {{"before", d.s_before}, {"after", d.s_after}};
    rep["mode_overlap2"] = {{"before", d.overlap2_before}, {"after", d.overlap2_after}};
    rep["peak_error_mhz"] = to_mhz(d.peak_err);
    rep["correction"] = {{"passes", d.corrected.passes},
                         {"residual_im_frac", d.corrected.residual_im_frac},
                         {"converged", d.corrected.converged}};
    rep["emitted_energy_f0"] = d.emitted_energy_f0;
    rep["config_hash"] = hex64(cfg.config_hash);
    return rep;
}

void write_design_artifacts(ArtifactSink& sink, const RunConfig& cfg, double omega_target,
                            const DesignOutcome& d) {
    const std::string dir = target_dir_name(omega_target);

    json table_json = json::parse(d.table.to_json_string());
    table_json["config_hash"] = hex64(cfg.config_hash);
    sink.write(dir + "/table.json", table_json.dump(2) + "\n");

    const DrivePulse& p = d.corrected.pulse;
    CsvWriter pulse_csv({"t_us", "vd_v", "omega_d_mhz", "phase_offset_rad"});
    for (std::size_t k = 0; k < p.size(); ++k) {
        pulse_csv.add_row({format_double(p.t0 + p.dt * static_cast<double>(k)),
                           format_double(p.vd[k]), format_double(to_mhz(p.omega_d[k])),
                           format_double(p.phase_offset[k])});
    }
    sink.write(dir + "/pulse.csv", pulse_csv.str());

    const std::vector<cplx> psi = demodulate(d.wave_after, omega_target);
    CsvWriter wf_csv({"t_us", "target_psi", "psi_out_re", "psi_out_im"});
    for (std::size_t k = 0; k < psi.size(); ++k) {
        const double t = d.wave_after.t0 + d.wave_after.dt * static_cast<double>(k);
        wf_csv.add_row({format_double(t), format_double(d.target.sample_at(t)),
                        format_double(2.0 * psi[k].real()), format_double(2.0 * psi[k].imag())});
    }
    sink.write(dir + "/waveform.csv", wf_csv.str());

    sink.write(dir + "/report.json", design_report(cfg, omega_target, d).dump(2) + "\n");

    // pulse modulation plot
    {
        PlotSeries amp;
        amp.label = "amplitude (V)";
        for (std::size_t k = 0; k < p.size(); ++k) {
            amp.x.push_back(p.t0 + p.dt * static_cast<double>(k));
            amp.y.push_back(p.vd[k]);
        }
        PlotOptions po;
        po.title = "Drive amplitude modulation";
        po.xlabel = "t (us)";
        po.ylabel = "V_d (V)";
        po.comment = sink.provenance();
        sink.write(dir + "/pulse_amplitude.svg", svg_plot({amp}, po));

        PlotSeries fr;
        fr.label = "drive frequency";
        fr.color = "#d62728";
        for (std::size_t k = 0; k < p.size(); ++k) {
            fr.x.push_back(p.t0 + p.dt * static_cast<double>(k));
            fr.y.push_back(to_mhz(p.omega_d[k]));
        }
        PlotOptions fo;
        fo.title = "Drive frequency modulation";
        fo.xlabel = "t (us)";
        fo.ylabel = "omega_d / 2pi (MHz)";
        fo.comment = sink.provenance();
        sink.write(dir + "/pulse_frequency.svg", svg_plot({fr}, fo));
    }

    // emitted waveform vs target
    {
        PlotSeries re, im, tgt;
        re.label = "Re psi_out";
        im.label = "Im psi_out";
        tgt.label = "target";
        tgt.color = "#000000";
        for (std::size_t k = 0; k < psi.size(); ++k) {
            const double t = d.wave_after.t0 + d.wave_after.dt * static_cast<double>(k);
            re.x.push_back(t);
            re.y.push_back(2.0 * psi[k].real());
            im.x.push_back(t);
            im.y.push_back(2.0 * psi[k].imag());
            tgt.x.push_back(t);
            tgt.y.push_back(d.target.sample_at(t));
        }
        PlotOptions po;
        po.title = "Corrected emission vs target";
        po.xlabel = "t (us)";
        po.ylabel = "amplitude (1/sqrt(us))";
        po.comment = sink.provenance();
        sink.write(dir + "/waveform.svg", svg_plot({re, im, tgt}, po));
    }
}

int cmd_design(const CommonOpts& opts) {
    const RunConfig cfg = load_config(opts.config_path);
    if (cfg.target.omega_ph.empty())
        throw std::runtime_error("config: target.omega_ph_mhz must list at least one frequency");
    const int workers = opts.effective_workers();
    const std::vector<SweepRecord> sweep = sweep_from_config(cfg, workers);

    ArtifactSink sink(opts.out_dir, "design", cfg, opts.seed);
    sink.write("sweep.csv", sweep_csv(sweep));
    for (double w : cfg.target.omega_ph) {
        const DesignOutcome d = design_target(cfg, sweep, w);
        write_design_artifacts(sink, cfg, w, d);
        std::cout << "design " << to_mhz(w) << " MHz: s " << d.s_before << " -> " << d.s_after
                  << ", overlap^2 " << d.overlap2_after << ", peak error "
                  << to_mhz(d.peak_err) * 1e3 << " kHz\n";
    }
    sink.finish();
    return 0;
}

// ---- emit ----

DrivePulse load_design_pulse(const std::string& out_dir, double omega_target) {
    const fs::path p = fs::path(out_dir) / target_dir_name(omega_target) / "pulse.csv";
    if (!fs::exists(p))
        throw std::runtime_error("missing design artifacts: " + p.string() +
                                 " (run the design command first)");
    std::vector<std::string> header;
    const auto rows = read_csv_numeric(p.string(), header);
    if (rows.size() < 2 || header.size() < 4)
        throw std::runtime_error("malformed pulse artifact: " + p.string());
    DrivePulse pulse;
    pulse.t0 = rows.front()[0];
    pulse.dt = rows[1][0] - rows[0][0];
    for (const auto& r : rows) {
        pulse.vd.push_back(r[1]);
        pulse.omega_d.push_back(mhz(r[2]));
        pulse.phase_offset.push_back(r[3]);
    }
    pulse.validate();
    return pulse;
}

int cmd_emit(const CommonOpts& opts) {
    const RunConfig cfg = load_config(opts.config_path);
    if (cfg.target.omega_ph.empty())
        throw std::runtime_error("config: target.omega_ph_mhz must list at least one frequency");
    ArtifactSink sink(opts.out_dir, "emit", cfg, opts.seed);
    for (double w : cfg.target.omega_ph) {
        const DrivePulse pulse = load_design_pulse(opts.out_dir, w);
        const IntegrationResult res =
            integrate(cfg.device, pulse, coherent_init(), cfg.sweep.dt_int);
        const std::string dir = target_dir_name(w);

        CsvWriter csv({"t_us", "re", "im", "rho_f0f0", "rho_g1g1", "rho_g0g0", "emitted_cum"});
        for (std::size_t k = 0; k < res.waveform.samples.size(); ++k) {
            const auto& st = res.trajectory.states[k];
            csv.add_row({format_double(res.waveform.t0 +
                                       res.waveform.dt * static_cast<double>(k)),
                         format_double(res.waveform.samples[k].real()),
                         format_double(res.waveform.samples[k].imag()),
                         format_double(st.rho_f0f0), format_double(st.rho_g1g1),
                         format_double(st.rho_g0g0),
                         format_double(res.trajectory.emitted_cum[k])});
        }
        sink.write(dir + "/emission.csv", csv.str());

        json side;
        side["frame_freq_mhz"] = to_mhz(res.waveform.frame_freq);
        side["emitted_energy"] = res.trajectory.emitted_energy;
        side["waveform_energy"] = res.waveform.energy();
        side["config_hash"] = hex64(cfg.config_hash);
        sink.write(dir + "/emission.json", side.dump(2) + "\n");

        PlotSeries re, im, mag;
        re.label = "Re";
        im.label = "Im";
        mag.label = "|amplitude|";
        mag.color = "#000000";
        for (std::size_t k = 0; k < res.waveform.samples.size(); ++k) {
            const double t = res.waveform.t0 + res.waveform.dt * static_cast<double>(k);
            re.x.push_back(t);
            re.y.push_back(res.waveform.samples[k].real());
            im.x.push_back(t);
            im.y.push_back(res.waveform.samples[k].imag());
            mag.x.push_back(t);
            mag.y.push_back(std::abs(res.waveform.samples[k]));
        }
        PlotOptions po;
        po.title = "Emitted waveform (resonator frame)";
        po.xlabel = "t (us)";
        po.ylabel = "amplitude (1/sqrt(us))";
        po.comment = sink.provenance();
        sink.write(dir + "/emission.svg", svg_plot({re, im, mag}, po));
    }
    sink.finish();
    return 0;
}

// ---- tomography ----

struct Preparation {
    const char* name;
    cplx beta, gamma;
};

const std::vector<Preparation>& six_preparations() {
    static const double s = 1.0 / std::sqrt(2.0);
    static const std::vector<Preparation> preps = {
        {"g", {1.0, 0.0}, {0.0, 0.0}},      {"f", {0.0, 0.0}, {1.0, 0.0}},
        {"g+f", {s, 0.0}, {s, 0.0}},        {"g-f", {s, 0.0}, {-s, 0.0}},
        {"g+if", {s, 0.0}, {0.0, s}},       {"g-if", {s, 0.0}, {0.0, -s}},
    };
    return preps;
}

PhotonDensityMatrix ideal_photon_state(const Preparation& p) {
    PhotonDensityMatrix rho;
    rho.rho11 = std::norm(p.gamma);
    rho.rho00 = 1.0 - rho.rho11;
    rho.rho01 = p.beta * std::conj(p.gamma);
    return rho;
}

int cmd_tomography(const CommonOpts& opts) {
    const RunConfig cfg = load_config(opts.config_path);
    if (cfg.target.omega_ph.empty())
        throw std::runtime_error("config: target.omega_ph_mhz must list at least one frequency");
    const int workers = opts.effective_workers();
    const auto& preps = six_preparations();
    const std::array<double, 4> angles{0.0, 0.25 * pi_val, 0.5 * pi_val, 0.75 * pi_val};

    ArtifactSink sink(opts.out_dir, "tomography", cfg, opts.seed);
    CsvWriter fid_csv({"target_mhz", "eta", "preparation", "fidelity", "fourth_moment",
                       "fourth_bound"});

    for (std::size_t ti = 0; ti < cfg.target.omega_ph.size(); ++ti) {
        const double w = cfg.target.omega_ph[ti];
        const DrivePulse pulse = load_design_pulse(opts.out_dir, w);
        const TargetWaveform target = sech_target(cfg.target.gamma_ph, cfg.target.epsilon_trunc);
        const PhotonWaveform wave =
            integrate(cfg.device, pulse, coherent_init(), cfg.sweep.dt_int).waveform;
        const std::string dir = target_dir_name(w);

        json report;
        report["target_omega_ph_mhz"] = to_mhz(w);
        report["samples_per_angle"] = cfg.tomo.samples_per_angle;
        report["config_hash"] = hex64(cfg.config_hash);
        report["etas"] = json::array();

        for (std::size_t ei = 0; ei < cfg.tomo.etas.size(); ++ei) {
            const double eta = cfg.tomo.etas[ei];

            // projected states for the six preparations
            std::vector<PhotonDensityMatrix> projected(preps.size());
            for (std::size_t pi = 0; pi < preps.size(); ++pi)
                projected[pi] = mode_project(wave, target, preps[pi].beta, preps[pi].gamma, w);

            // draw all 6x4 sample sets in parallel, seeds fixed per slot
            std::vector<QuadratureSamples> sets(preps.size() * angles.size());
            parallel_for(sets.size(), workers, [&](std::size_t idx) {
                const std::size_t pi = idx / angles.size();
                const std::size_t ai = idx % angles.size();
                const std::uint64_t stream =
                    ((ti * cfg.tomo.etas.size() + ei) * preps.size() + pi) * angles.size() + ai;
                sets[idx] = sample_quadratures(projected[pi], angles[ai], eta,
                                               cfg.tomo.samples_per_angle,
                                               derive_seed(opts.seed, stream));
            });

            json eta_block;
            eta_block["eta"] = eta;
            eta_block["preparations"] = json::array();
            std::vector<std::pair<PhotonDensityMatrix, PhotonDensityMatrix>> in_out;
            double f_sum = 0.0;
            for (std::size_t pi = 0; pi < preps.size(); ++pi) {
                const QuadratureSamples& q0 = sets[pi * angles.size() + 0];
                const QuadratureSamples& q90 = sets[pi * angles.size() + 2];
                const PhotonDensityMatrix recon = reconstruct(q0, q90);
                const double fid = state_fidelity(recon, preps[pi].beta, preps[pi].gamma);
                const FourthMomentResult fm = fourth_moment(
                    {sets[pi * angles.size() + 0], sets[pi * angles.size() + 1],
                     sets[pi * angles.size() + 2], sets[pi * angles.size() + 3]});
                in_out.push_back({ideal_photon_state(preps[pi]), recon});
                f_sum += fid;
                fid_csv.add_row({format_double(to_mhz(w)), format_double(eta), preps[pi].name,
                                 format_double(fid), format_double(fm.value),
                                 format_double(fm.bound)});
                eta_block["preparations"].push_back(
                    {{"name", preps[pi].name},
                     {"fidelity", fid},
                     {"mode_overlap2", projected[pi].rho11 / std::max(std::norm(preps[pi].gamma),
                                                                      1e-300)},
                     {"fourth_moment", fm.value},
                     {"fourth_bound", fm.bound},
                     {"rho00", recon.rho00},
                     {"rho11", recon.rho11},
                     {"rho01_re", recon.rho01.real()},
                     {"rho01_im", recon.rho01.imag()}});

                if (ei == 0) {
                    // phase-space render of the reconstructed state
                    std::vector<double> grid;
                    for (int k = 0; k <= 80; ++k) grid.push_back(-3.0 + 6.0 * k / 80.0);
                    const auto field = wigner(recon, grid, grid);
                    char title[96];
                    std::snprintf(title, sizeof title, "Wigner, prep %s, %.0f MHz",
                                  preps[pi].name, to_mhz(w));
                    sink.write(dir + "/wigner_" + std::to_string(pi) + ".svg",
                               svg_heatmap(field, -3.0, 3.0, -3.0, 3.0, title,
                                           sink.provenance()));
                }
            }
            const ProcessTomographyResult proc = process_tomography(in_out);
            eta_block["fidelity_avg"] = f_sum / static_cast<double>(preps.size());
            eta_block["process_fidelity"] = proc.process_fidelity;
            json ptm = json::array();
            for (const auto& row : proc.ptm.r) ptm.push_back(row);
            eta_block["ptm"] = ptm;
            report["etas"].push_back(eta_block);
        }
        sink.write(dir + "/tomography.json", report.dump(2) + "\n");
    }
    sink.write("fidelity.csv", fid_csv.str());
    sink.finish();
    return 0;
}

// ---- scaling / overlap ----

int cmd_scaling(const CommonOpts& opts) {
    const RunConfig cfg = load_config(opts.config_path);
    ArtifactSink sink(opts.out_dir, "scaling", cfg, opts.seed);

    CsvWriter sig_csv({"n_pairs", "delta_tunable_mhz", "sigma_max_mhz"});
    std::vector<PlotSeries> sig_series;
    for (int n : cfg.network.n_pairs) {
        PlotSeries s;
        s.label = "N = " + std::to_string(n);
        for (double delta : cfg.network.delta_grid) {
            const double sig = max_sigma(n, delta, cfg.network.p_min);
            sig_csv.add_row({std::to_string(n), format_double(to_mhz(delta)),
                             format_double(to_mhz(sig))});
            s.x.push_back(to_mhz(delta));
            s.y.push_back(to_mhz(sig));
        }
        sig_series.push_back(std::move(s));
    }
    {
        PlotSeries ref;
        ref.label = "10 MHz spread";
        ref.color = "#999999";
        ref.x = {to_mhz(cfg.network.delta_grid.front()), to_mhz(cfg.network.delta_grid.back())};
        ref.y = {10.0, 10.0};
        sig_series.push_back(std::move(ref));
    }
    sink.write("sigma_max.csv", sig_csv.str());
    PlotOptions sig_opt;
    sig_opt.title = "Maximum frequency spread vs tunable range";
    sig_opt.xlabel = "tunable range (MHz)";
    sig_opt.ylabel = "sigma_max (MHz)";
    sig_opt.vline = 40.0;
    sig_opt.has_vline = true;
    sig_opt.comment = sink.provenance();
    sink.write("sigma_max.svg", svg_plot(sig_series, sig_opt));

    // overlap curve with the 0.16 threshold marker
    CsvWriter ov_csv({"detuning_ratio", "abs_overlap"});
    PlotSeries ov;
    ov.label = "|I|";
    for (double r : cfg.network.detuning_ratio_grid) {
        const double a = std::abs(mode_overlap(r * cfg.target.gamma_ph, cfg.target.gamma_ph));
        ov_csv.add_row({format_double(r), format_double(a)});
        ov.x.push_back(r);
        ov.y.push_back(a);
    }
    sink.write("overlap.csv", ov_csv.str());
    PlotOptions ov_opt;
    ov_opt.title = "Receiver mode overlap vs detuning";
    ov_opt.xlabel = "detuning / gamma_ph";
    ov_opt.ylabel = "|I|";
    ov_opt.vline = 0.16;
    ov_opt.has_vline = true;
    ov_opt.comment = sink.provenance();
    sink.write("overlap.svg", svg_plot({ov}, ov_opt));

    json rep;
    {
        NetworkSpec anchor;
        anchor.n_pairs = 10;
        anchor.sigma = mhz(10.0);
        anchor.delta_tunable = mhz(40.0);
        rep["anchors"] = {
            {"erf_2", erf_precise(2.0)},
            {"p_n10_40mhz_10mhz", matching_probability(anchor)},
            {"sigma_max_n10_40mhz_mhz", to_mhz(max_sigma(10, mhz(40.0), 0.5))},
            {"overlap_crossing_ratio",
             fixed_frequency_budget(cfg.target.gamma_ph) / cfg.target.gamma_ph},
            {"budget_mhz", to_mhz(fixed_frequency_budget(cfg.target.gamma_ph))}};
    }
    rep["p_min"] = cfg.network.p_min;
    rep["gamma_ph_mhz"] = to_mhz(cfg.target.gamma_ph);
    rep["config_hash"] = hex64(cfg.config_hash);
    sink.write("scaling_report.json", rep.dump(2) + "\n");
    sink.finish();
    return 0;
}

int cmd_overlap(const CommonOpts& opts) {
    const RunConfig cfg = load_config(opts.config_path);
    ArtifactSink sink(opts.out_dir, "overlap", cfg, opts.seed);
    const double gamma = cfg.target.gamma_ph;

    CsvWriter csv({"delta_omega_mhz", "detuning_ratio", "re_overlap", "im_overlap",
                   "abs_overlap"});
    PlotSeries ov;
    ov.label = "|I|";
    for (double r : cfg.network.detuning_ratio_grid) {
        const std::complex<double> I = mode_overlap(r * gamma, gamma);
        csv.add_row({format_double(to_mhz(r * gamma)), format_double(r),
                     format_double(I.real()), format_double(I.imag()),
                     format_double(std::abs(I))});
        ov.x.push_back(r);
        ov.y.push_back(std::abs(I));
    }
    sink.write("overlap.csv", csv.str());

    const double budget = fixed_frequency_budget(gamma);
    PlotOptions po;
    po.title = "Mode overlap vs detuning";
    po.xlabel = "detuning / gamma_ph";
    po.ylabel = "|I|";
    po.vline = budget / gamma;
    po.has_vline = true;
    po.comment = sink.provenance();
    sink.write("overlap.svg", svg_plot({ov}, po));

    json rep;
    rep["gamma_ph_mhz"] = to_mhz(gamma);
    rep["budget_mhz"] = to_mhz(budget);
    rep["crossing_ratio"] = budget / gamma;
    rep["config_hash"] = hex64(cfg.config_hash);
    sink.write("overlap_report.json", rep.dump(2) + "\n");
    sink.finish();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"shaped microwave photon emission toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    CommonOpts opts;
    app.add_option("--config", opts.config_path, "JSON run configuration")->required();
    app.add_option("--out", opts.out_dir, "output directory");
    app.add_option("--seed", opts.seed, "base RNG seed");
    app.add_option("--workers", opts.workers, "worker threads (0 = hardware)");

    auto* sc_spec = app.add_subcommand("spectroscopy", "square-pulse emission sweep");
    auto* sc_design = app.add_subcommand("design", "calibrate and synthesize drive pulses");
    auto* sc_emit = app.add_subcommand("emit", "integrate a designed pulse and dump the emission");
    auto* sc_tomo = app.add_subcommand("tomography", "simulated quadrature tomography");
    auto* sc_scale = app.add_subcommand("scaling", "network scalability curves");
    auto* sc_ovl = app.add_subcommand("overlap", "receiver mode-overlap analysis");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sc_spec->parsed()) return cmd_spectroscopy(opts);
        if (sc_design->parsed()) return cmd_design(opts);
        if (sc_emit->parsed()) return cmd_emit(opts);
        if (sc_tomo->parsed()) return cmd_tomography(opts);
        if (sc_scale->parsed()) return cmd_scaling(opts);
        if (sc_ovl->parsed()) return cmd_overlap(opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
