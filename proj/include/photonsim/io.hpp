#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "photonsim/device.hpp"

namespace photonsim {

// %.17g: exact double round-trip, deterministic across runs.
std::string format_double(double v);

std::uint64_t fnv1a64(const void* data, std::size_t len);
std::uint64_t fnv1a64(const std::string& s);
std::string hex64(std::uint64_t v);

// splitmix64 step; used to derive statistically independent stream seeds from
// one base seed so parallel sampling stays reproducible.
std::uint64_t splitmix64_next(std::uint64_t& state);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// RFC 4180: CRLF line endings, quoting only where needed.
class CsvWriter {
  public:
    explicit CsvWriter(const std::vector<std::string>& header);
    void add_row(const std::vector<std::string>& cells);
    const std::string& str() const { return buffer_; }

  private:
    void append_line(const std::vector<std::string>& cells);
    std::size_t ncols_;
    std::string buffer_;
};

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// ---- minimal SVG rendering (no plotting dependency) ----

struct PlotSeries {
    std::vector<double> x, y;
    std::string label;
    std::string color;    // empty -> palette color by index
    bool markers = false;  // draw sample circles
    bool line = true;      // connect with a polyline
};

struct PlotOptions {
    std::string title, xlabel, ylabel;
    double vline = 0.0;  // vertical marker position, drawn when has_vline
    bool has_vline = false;
    bool logy = false;
    std::string comment;  // embedded as an SVG comment (provenance)
};

std::string svg_plot(const std::vector<PlotSeries>& series, const PlotOptions& opt);

// field[row][col] rendered over [x0,x1] x [y0,y1], diverging palette centered
// at zero (blue negative, red positive).
std::string svg_heatmap(const std::vector<std::vector<double>>& field, double x0, double x1,
                        double y0, double y1, const std::string& title,
                        const std::string& comment);

// ---- run configuration ----

struct SweepConfig {
    std::vector<double> vd_grid;       // volts
    std::vector<double> omega_d_grid;  // rad/us
    double pulse_len = 4.0;            // us
    double dt_int = 1e-4;              // us
    double table_tolerance = 0.0;      // rad/us; bracketing trust width
};

struct TargetConfig {
    std::vector<double> omega_ph;  // rad/us
    double gamma_ph = 0.0;         // rad/us
    double epsilon_trunc = 1e-3;
    int correction_passes = 2;
    double tail_pad_frac = 0.20;  // emission tail window, fraction of pulse length
    double tail_pad_min = 0.05;   // us
};

struct TomographyConfig {
    std::uint64_t samples_per_angle = 1000000;
    std::vector<double> etas{1.0, 0.374};
};

struct NetworkRunConfig {
    std::vector<int> n_pairs{1, 2, 5, 10};
    std::vector<double> delta_grid;  // rad/us, tunable-range axis
    double p_min = 0.5;
    std::vector<double> detuning_ratio_grid;  // delta_omega / gamma_ph axis
};

struct RunConfig {
    DeviceParams device;
    BareResonatorFilterParams bare;
    SweepConfig sweep;
    TargetConfig target;
    TomographyConfig tomo;
    NetworkRunConfig network;
    std::uint64_t config_hash = 0;  // FNV-1a of the canonical config dump
};

// Parse the unit-suffixed JSON config (see configs/default.json for the
// schema). Grid-valued fields accept either an explicit array or
// {"min": .., "max": .., "count": ..}. Throws with the offending field name.
RunConfig load_config(const std::string& path);

}  // namespace photonsim
