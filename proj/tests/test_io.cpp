#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <string>

#include "photonsim/io.hpp"
#include "photonsim/units.hpp"

using namespace photonsim;

namespace {

std::string tmp_file(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("doubles round-trip exactly through their text form") {
    for (double v : {0.1, 1.0 / 3.0, -0.0, 1e-300, 6.02214076e23, 12345.678901234567,
                     -2.2250738585072014e-308}) {
        const std::string s = format_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("FNV-1a 64-bit matches the published test vectors") {
    CHECK(fnv1a64(std::string("")) == 0xcbf29ce484222325ull);
    CHECK(fnv1a64(std::string("a")) == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a64(std::string("foobar")) == 0x85944171f73967e8ull);
    CHECK(hex64(0xdeadbeefull) == "00000000deadbeef");
    CHECK(hex64(0xcbf29ce484222325ull) == "cbf29ce484222325");
}

TEST_CASE("derived seeds are deterministic and distinct per stream") {
    const std::uint64_t base = 12345;
    CHECK(derive_seed(base, 0) == derive_seed(base, 0));
    CHECK(derive_seed(base, 0) != derive_seed(base, 1));
    CHECK(derive_seed(base, 1) != derive_seed(base + 1, 1));
    // a run of streams has no repeats
    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 1000; ++s) seen.insert(derive_seed(base, s));
    CHECK(seen.size() == 1000);
}

TEST_CASE("CSV output quotes exactly where the format requires") {
    CsvWriter csv({"name", "value"});
    csv.add_row({"plain", "1.5"});
    csv.add_row({"comma,inside", "2"});
    csv.add_row({"quote\"inside", "3"});
    csv.add_row({"line\nbreak", "4"});
    const std::string& s = csv.str();
    CHECK(s.find("name,value\r\n") == 0);
    CHECK(s.find("plain,1.5\r\n") != std::string::npos);
    CHECK(s.find("\"comma,inside\",2\r\n") != std::string::npos);
    CHECK(s.find("\"quote\"\"inside\",3\r\n") != std::string::npos);
    CHECK(s.find("\"line\nbreak\",4\r\n") != std::string::npos);
    CHECK_THROWS(csv.add_row({"too", "many", "cells"}));
}

TEST_CASE("text files round-trip bytes exactly") {
    const std::string path = tmp_file("photonsim_io_roundtrip.txt");
    const std::string content = "a,b\r\nc\nd\r\n";
    write_text_file(path, content);
    CHECK(read_text_file(path) == content);
    std::filesystem::remove(path);
}

TEST_CASE("SVG rendering is deterministic and well-formed") {
    PlotSeries s1;
    s1.x = {0.0, 1.0, 2.0, 3.0};
    s1.y = {0.0, 1.0, 4.0, 9.0};
    s1.label = "squares <&>";
    PlotOptions opt;
    opt.title = "title <tag>";
    opt.xlabel = "x";
    opt.ylabel = "y";
    opt.vline = 1.5;
    opt.has_vline = true;
    opt.comment = "config deadbeef";
    const std::string a = svg_plot({s1}, opt);
    const std::string b = svg_plot({s1}, opt);
    CHECK(a == b);
    CHECK(a.rfind("<svg", 0) == 0);
    CHECK(a.find("</svg>") != std::string::npos);
    CHECK(a.find("title &lt;tag&gt;") != std::string::npos);
    CHECK(a.find("squares &lt;&amp;&gt;") != std::string::npos);
    CHECK(a.find("config deadbeef") != std::string::npos);
    CHECK(a.find("<tag>") == std::string::npos);

    const std::vector<std::vector<double>> field = {{-1.0, 0.0}, {0.5, 1.0}};
    const std::string h = svg_heatmap(field, 0.0, 1.0, 0.0, 1.0, "field", "prov");
    CHECK(h.rfind("<svg", 0) == 0);
    CHECK(h.find("prov") != std::string::npos);
}

TEST_CASE("run configuration parses unit-suffixed fields and grid shorthands") {
    const std::string path = tmp_file("photonsim_io_config.json");
    write_text_file(path, R"({
      "device": { "kappa_mhz": 60.0 },
      "sweep": {
        "vd_grid_v": [0.2, 0.4],
        "omega_d_grid_mhz": { "min": 5400.0, "max": 5460.0, "count": 4 },
        "pulse_len_us": 3.0
      },
      "target": { "omega_ph_mhz": [10300.0], "gamma_ph_mhz": 2.0 },
      "tomography": { "samples_per_angle": 5000, "eta": [0.8] },
      "network": { "n_pairs": [3], "p_min": 0.6 }
    })");
    const RunConfig cfg = load_config(path);
    std::filesystem::remove(path);

    CHECK(to_mhz(cfg.device.kappa) == doctest::Approx(60.0));
    CHECK(to_mhz(cfg.device.omega_r) == doctest::Approx(10306.0));  // untouched default
    CHECK(cfg.sweep.vd_grid == std::vector<double>{0.2, 0.4});
    REQUIRE(cfg.sweep.omega_d_grid.size() == 4);
    CHECK(to_mhz(cfg.sweep.omega_d_grid.front()) == doctest::Approx(5400.0));
    CHECK(to_mhz(cfg.sweep.omega_d_grid.back()) == doctest::Approx(5460.0));
    CHECK(to_mhz(cfg.sweep.omega_d_grid[1]) == doctest::Approx(5420.0));
    CHECK(cfg.sweep.pulse_len == 3.0);
    CHECK(cfg.sweep.dt_int == 1e-4);  // default
    CHECK(to_mhz(cfg.target.gamma_ph) == doctest::Approx(2.0));
    CHECK(cfg.target.correction_passes == 2);  // default
    CHECK(cfg.tomo.samples_per_angle == 5000);
    CHECK(cfg.tomo.etas == std::vector<double>{0.8});
    CHECK(cfg.network.n_pairs == std::vector<int>{3});
    CHECK(cfg.network.p_min == 0.6);
    CHECK(cfg.config_hash != 0);
}

TEST_CASE("distinct configurations hash differently, identical ones identically") {
    const std::string p1 = tmp_file("photonsim_io_h1.json");
    const std::string p2 = tmp_file("photonsim_io_h2.json");
    write_text_file(p1, R"({ "target": { "gamma_ph_mhz": 3.0 } })");
    write_text_file(p2, R"({ "target": { "gamma_ph_mhz": 3.5 } })");
    const RunConfig a = load_config(p1);
    const RunConfig b = load_config(p1);
    const RunConfig c = load_config(p2);
    std::filesystem::remove(p1);
    std::filesystem::remove(p2);
    CHECK(a.config_hash == b.config_hash);
    CHECK(a.config_hash != c.config_hash);
}

TEST_CASE("malformed configuration is rejected with a clear error") {
    const std::string path = tmp_file("photonsim_io_bad.json");
    write_text_file(path, "{ not json");
    CHECK_THROWS(load_config(path));
    write_text_file(path, R"({ "sweep": { "omega_d_grid_mhz": { "min": 5.0 } } })");
    CHECK_THROWS(load_config(path));  // incomplete grid shorthand
    std::filesystem::remove(path);
    CHECK_THROWS(load_config("/nonexistent/path/config.json"));
}
