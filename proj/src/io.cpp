#include "photonsim/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "photonsim/units.hpp"

namespace photonsim {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint64_t fnv1a64(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t state = base ^ (0x9e3779b97f4a7c15ull * (stream + 1));
    splitmix64_next(state);
    return splitmix64_next(state);
}

CsvWriter::CsvWriter(const std::vector<std::string>& header) : ncols_(header.size()) {
    if (header.empty()) throw std::invalid_argument("CsvWriter: empty header");
    append_line(header);
}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
    if (cells.size() != ncols_)
        throw std::invalid_argument("CsvWriter: row width does not match header");
    append_line(cells);
}

void CsvWriter::append_line(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) buffer_ += ',';
        const std::string& c = cells[i];
        if (c.find_first_of(",\"\r\n") != std::string::npos) {
            buffer_ += '"';
            for (char ch : c) {
                if (ch == '"') buffer_ += '"';
                buffer_ += ch;
            }
            buffer_ += '"';
        } else {
            buffer_ += c;
        }
    }
    buffer_ += "\r\n";
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// ---- SVG ----

namespace {

const char* palette(std::size_t i) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};
    return colors[i % 8];
}

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

double nice_step(double range) {
    if (!(range > 0.0)) return 1.0;
    const double raw = range / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double r = raw / mag;
    if (r < 1.5) return mag;
    if (r < 3.5) return 2.0 * mag;
    if (r < 7.5) return 5.0 * mag;
    return 10.0 * mag;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string svg_plot(const std::vector<PlotSeries>& series, const PlotOptions& opt) {
    const double W = 860, H = 520, L = 75, R = 25, T = 45, B = 55;
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool any = false;
    for (const auto& s : series) {
        for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
            double yv = s.y[k];
            if (opt.logy) {
                if (!(yv > 0.0)) continue;
                yv = std::log10(yv);
            }
            if (!std::isfinite(s.x[k]) || !std::isfinite(yv)) continue;
            if (!any) {
                xmin = xmax = s.x[k];
                ymin = ymax = yv;
                any = true;
            } else {
                xmin = std::min(xmin, s.x[k]);
                xmax = std::max(xmax, s.x[k]);
                ymin = std::min(ymin, yv);
                ymax = std::max(ymax, yv);
            }
        }
    }
    if (opt.has_vline) {
        xmin = std::min(xmin, opt.vline);
        xmax = std::max(xmax, opt.vline);
    }
    if (xmax <= xmin) xmax = xmin + 1.0;
    if (ymax <= ymin) ymax = ymin + 1.0;
    const double xpad = 0.04 * (xmax - xmin), ypad = 0.06 * (ymax - ymin);
    xmin -= xpad;
    xmax += xpad;
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
    auto py = [&](double y) {
        if (opt.logy) y = std::log10(std::max(y, 1e-300));
        return H - B - (y - ymin) / (ymax - ymin) * (H - T - B);
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << W << " " << H
        << "\" font-family=\"Helvetica,Arial,sans-serif\">\n";
    if (!opt.comment.empty()) svg << "<!-- " << xml_escape(opt.comment) << " -->\n";
    svg << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    svg << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << xml_escape(opt.title) << "</text>\n";

    // grid + ticks
    const double xstep = nice_step(xmax - xmin), ystep = nice_step(ymax - ymin);
    for (double tx = std::ceil(xmin / xstep) * xstep; tx <= xmax + 1e-12 * xstep; tx += xstep) {
        svg << "<line x1=\"" << fmt2(px(tx)) << "\" y1=\"" << T << "\" x2=\"" << fmt2(px(tx))
            << "\" y2=\"" << H - B << "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
        svg << "<text x=\"" << fmt2(px(tx)) << "\" y=\"" << H - B + 18
            << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt_tick(tx) << "</text>\n";
    }
    for (double ty = std::ceil(ymin / ystep) * ystep; ty <= ymax + 1e-12 * ystep; ty += ystep) {
        const double yy = H - B - (ty - ymin) / (ymax - ymin) * (H - T - B);
        svg << "<line x1=\"" << L << "\" y1=\"" << fmt2(yy) << "\" x2=\"" << W - R << "\" y2=\""
            << fmt2(yy) << "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
        svg << "<text x=\"" << L - 6 << "\" y=\"" << fmt2(yy + 4)
            << "\" text-anchor=\"end\" font-size=\"11\">"
            << fmt_tick(opt.logy ? std::pow(10.0, ty) : ty) << "</text>\n";
    }
    svg << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\""
        << H - T - B << "\" fill=\"none\" stroke=\"#404040\"/>\n";
    svg << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12
        << "\" text-anchor=\"middle\" font-size=\"13\">" << xml_escape(opt.xlabel) << "</text>\n";
    svg << "<text x=\"18\" y=\"" << (T + H - B) / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
        << (T + H - B) / 2 << ")\">" << xml_escape(opt.ylabel) << "</text>\n";

    if (opt.has_vline) {
        svg << "<line x1=\"" << fmt2(px(opt.vline)) << "\" y1=\"" << T << "\" x2=\""
            << fmt2(px(opt.vline)) << "\" y2=\"" << H - B
            << "\" stroke=\"#555555\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"/>\n";
    }

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const std::string color = s.color.empty() ? palette(si) : s.color;
        if (s.line && s.x.size() > 1) {
            svg << "<polyline fill=\"none\" stroke=\"" << color
                << "\" stroke-width=\"1.8\" points=\"";
            for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
                if (opt.logy && !(s.y[k] > 0.0)) continue;
                svg << fmt2(px(s.x[k])) << "," << fmt2(py(s.y[k])) << " ";
            }
            svg << "\"/>\n";
        }
        if (s.markers) {
            for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
                if (opt.logy && !(s.y[k] > 0.0)) continue;
                svg << "<circle cx=\"" << fmt2(px(s.x[k])) << "\" cy=\"" << fmt2(py(s.y[k]))
                    << "\" r=\"2.2\" fill=\"" << color << "\"/>\n";
            }
        }
        if (!s.label.empty()) {
            const double ly = T + 16 + 16 * static_cast<double>(si);
            svg << "<line x1=\"" << W - R - 150 << "\" y1=\"" << fmt2(ly - 4) << "\" x2=\""
                << W - R - 128 << "\" y2=\"" << fmt2(ly - 4) << "\" stroke=\"" << color
                << "\" stroke-width=\"2\"/>\n";
            svg << "<text x=\"" << W - R - 122 << "\" y=\"" << fmt2(ly)
                << "\" font-size=\"11\">" << xml_escape(s.label) << "</text>\n";
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string svg_heatmap(const std::vector<std::vector<double>>& field, double x0, double x1,
                        double y0, double y1, const std::string& title,
                        const std::string& comment) {
    if (field.empty() || field.front().empty())
        throw std::invalid_argument("svg_heatmap: empty field");
    const std::size_t ny = field.size(), nx = field.front().size();
    double amax = 0.0;
    for (const auto& row : field)
        for (double v : row) amax = std::max(amax, std::abs(v));
    if (amax <= 0.0) amax = 1.0;

    const double W = 640, H = 640, L = 70, R = 30, T = 50, B = 55;
    const double cw = (W - L - R) / static_cast<double>(nx);
    const double ch = (H - T - B) / static_cast<double>(ny);

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << W << " " << H
        << "\" font-family=\"Helvetica,Arial,sans-serif\">\n";
    if (!comment.empty()) svg << "<!-- " << xml_escape(comment) << " -->\n";
    svg << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    svg << "<text x=\"" << W / 2 << "\" y=\"26\" text-anchor=\"middle\" font-size=\"15\">"
        << xml_escape(title) << "</text>\n";
    for (std::size_t iy = 0; iy < ny; ++iy) {
        // row 0 is the lowest y value; SVG y axis points down
        const double ypix = H - B - ch * static_cast<double>(iy + 1);
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const double v = field[iy][ix] / amax;
            int r, g, b;
            if (v >= 0.0) {
                r = 255;
                g = static_cast<int>(std::lround(255.0 * (1.0 - v) + 40.0 * v));
                b = static_cast<int>(std::lround(255.0 * (1.0 - v) + 40.0 * v));
            } else {
                r = static_cast<int>(std::lround(255.0 * (1.0 + v) - 40.0 * v));
                g = static_cast<int>(std::lround(255.0 * (1.0 + v) - 40.0 * v));
                b = 255;
            }
            svg << "<rect x=\"" << fmt2(L + cw * static_cast<double>(ix)) << "\" y=\""
                << fmt2(ypix) << "\" width=\"" << fmt2(cw + 0.5) << "\" height=\""
                << fmt2(ch + 0.5) << "\" fill=\"rgb(" << r << "," << g << "," << b << ")\"/>\n";
        }
    }
    svg << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\""
        << H - T - B << "\" fill=\"none\" stroke=\"#404040\"/>\n";
    svg << "<text x=\"" << L << "\" y=\"" << H - B + 18 << "\" font-size=\"11\">" << fmt_tick(x0)
        << "</text>\n";
    svg << "<text x=\"" << W - R << "\" y=\"" << H - B + 18
        << "\" text-anchor=\"end\" font-size=\"11\">" << fmt_tick(x1) << "</text>\n";
    svg << "<text x=\"" << L - 6 << "\" y=\"" << H - B << "\" text-anchor=\"end\" font-size=\"11\">"
        << fmt_tick(y0) << "</text>\n";
    svg << "<text x=\"" << L - 6 << "\" y=\"" << T + 10
        << "\" text-anchor=\"end\" font-size=\"11\">" << fmt_tick(y1) << "</text>\n";
    svg << "<text x=\"" << W / 2 << "\" y=\"" << H - 12
        << "\" text-anchor=\"middle\" font-size=\"12\">max |value| = " << fmt_tick(amax)
        << "</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

// ---- config ----

namespace {

using nlohmann::json;

double num_at(const json& j, const std::string& key) {
    if (!j.contains(key)) throw std::runtime_error("config: missing field '" + key + "'");
    if (!j.at(key).is_number()) throw std::runtime_error("config: field '" + key + "' not numeric");
    return j.at(key).get<double>();
}

double num_or(const json& j, const std::string& key, double def) {
    return j.contains(key) ? num_at(j, key) : def;
}

// Accepts [v0, v1, ...] or {"min":, "max":, "count":}; values scaled by `scale`.
std::vector<double> grid_at(const json& j, const std::string& key, double scale) {
    if (!j.contains(key)) return {};
    const json& g = j.at(key);
    std::vector<double> out;
    if (g.is_array()) {
        for (const auto& v : g) out.push_back(v.get<double>() * scale);
    } else if (g.is_object()) {
        const double lo = num_at(g, "min"), hi = num_at(g, "max");
        const auto count = static_cast<std::size_t>(num_at(g, "count"));
        if (count < 1) throw std::runtime_error("config: grid '" + key + "' count must be >= 1");
        for (std::size_t k = 0; k < count; ++k) {
            const double f = count == 1 ? 0.0
                                        : static_cast<double>(k) / static_cast<double>(count - 1);
            out.push_back((lo + f * (hi - lo)) * scale);
        }
    } else {
        throw std::runtime_error("config: grid '" + key + "' must be an array or {min,max,count}");
    }
    return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
    std::vector<double> out(count);
    for (std::size_t k = 0; k < count; ++k)
        out[k] = lo + (hi - lo) * (count == 1 ? 0.0
                                              : static_cast<double>(k) /
                                                    static_cast<double>(count - 1));
    return out;
}

}  // namespace

RunConfig load_config(const std::string& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw std::runtime_error("config: failed to parse " + path + ": " + e.what());
    }

    RunConfig cfg;
    cfg.device = default_device();
    cfg.bare = default_bare_modes();
    if (j.contains("device")) {
        const json& d = j.at("device");
        cfg.device.omega_ge = mhz(num_or(d, "omega_ge_mhz", to_mhz(cfg.device.omega_ge)));
        cfg.device.alpha = mhz(num_or(d, "alpha_mhz", to_mhz(cfg.device.alpha)));
        cfg.device.omega_r = mhz(num_or(d, "omega_r_mhz", to_mhz(cfg.device.omega_r)));
        cfg.device.kappa = mhz(num_or(d, "kappa_mhz", to_mhz(cfg.device.kappa)));
        cfg.device.g_qr = mhz(num_or(d, "g_qr_mhz", to_mhz(cfg.device.g_qr)));
        cfg.device.chi = mhz(num_or(d, "chi_mhz", to_mhz(cfg.device.chi)));
        cfg.device.transduction_k =
            mhz(num_or(d, "transduction_mhz_per_v", to_mhz(cfg.device.transduction_k)));
        cfg.device.stark_f0 = num_or(d, "stark_f0_mhz_per_ghz2",
                                     cfg.device.stark_f0 * (two_pi * 1e6)) /
                              (two_pi * 1e6);
        cfg.device.validate();
    }
    if (j.contains("filter")) {
        const json& f = j.at("filter");
        cfg.bare.omega_r_bare = mhz(num_or(f, "omega_r_bare_mhz", to_mhz(cfg.bare.omega_r_bare)));
        cfg.bare.omega_f_bare = mhz(num_or(f, "omega_f_bare_mhz", to_mhz(cfg.bare.omega_f_bare)));
        cfg.bare.J = mhz(num_or(f, "j_mhz", to_mhz(cfg.bare.J)));
        cfg.bare.kappa_f = mhz(num_or(f, "kappa_f_mhz", to_mhz(cfg.bare.kappa_f)));
        cfg.bare.chi = mhz(num_or(f, "chi_mhz", to_mhz(cfg.bare.chi)));
        cfg.bare.theta = num_or(f, "theta_rad", cfg.bare.theta);
        cfg.bare.validate();
    }

    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        cfg.sweep.vd_grid = grid_at(s, "vd_grid_v", 1.0);
        cfg.sweep.omega_d_grid = grid_at(s, "omega_d_grid_mhz", two_pi);
        cfg.sweep.pulse_len = num_or(s, "pulse_len_us", cfg.sweep.pulse_len);
        cfg.sweep.dt_int = num_or(s, "dt_int_us", cfg.sweep.dt_int);
        cfg.sweep.table_tolerance = mhz(num_or(s, "table_tolerance_mhz", 10.0));
    } else {
        cfg.sweep.table_tolerance = mhz(10.0);
    }

    if (j.contains("target")) {
        const json& t = j.at("target");
        cfg.target.omega_ph = grid_at(t, "omega_ph_mhz", two_pi);
        cfg.target.gamma_ph = mhz(num_or(t, "gamma_ph_mhz", 3.0));
        cfg.target.epsilon_trunc = num_or(t, "epsilon_trunc", cfg.target.epsilon_trunc);
        cfg.target.correction_passes =
            static_cast<int>(num_or(t, "correction_passes", cfg.target.correction_passes));
        cfg.target.tail_pad_frac = num_or(t, "tail_pad_frac", cfg.target.tail_pad_frac);
        cfg.target.tail_pad_min = num_or(t, "tail_pad_min_us", cfg.target.tail_pad_min);
    } else {
        cfg.target.gamma_ph = mhz(3.0);
    }

    if (j.contains("tomography")) {
        const json& t = j.at("tomography");
        cfg.tomo.samples_per_angle = static_cast<std::uint64_t>(
            num_or(t, "samples_per_angle", static_cast<double>(cfg.tomo.samples_per_angle)));
        if (t.contains("eta")) {
            cfg.tomo.etas.clear();
            for (const auto& e : t.at("eta")) cfg.tomo.etas.push_back(e.get<double>());
        }
    }

    if (j.contains("network")) {
        const json& n = j.at("network");
        if (n.contains("n_pairs")) {
            cfg.network.n_pairs.clear();
            for (const auto& v : n.at("n_pairs"))
                cfg.network.n_pairs.push_back(v.get<int>());
        }
        cfg.network.delta_grid = grid_at(n, "delta_tunable_grid_mhz", two_pi);
        cfg.network.p_min = num_or(n, "p_min", cfg.network.p_min);
        cfg.network.detuning_ratio_grid = grid_at(n, "detuning_ratio_grid", 1.0);
    }
    if (cfg.network.delta_grid.empty()) cfg.network.delta_grid = linspace(mhz(5.0), mhz(80.0), 76);
    if (cfg.network.detuning_ratio_grid.empty())
        cfg.network.detuning_ratio_grid = linspace(0.0, 0.5, 101);

    cfg.config_hash = fnv1a64(j.dump());
    return cfg;
}

}  // namespace photonsim
