// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mdmsim/experiment.hpp"

using namespace mdmsim;
namespace fs = std::filesystem;

namespace {

// Desk-sized spec: short frame, few sections, quiet link. Decorrelation paths
// scale with the frame so the cyclic shifts stay clear of the period.
ExperimentSpec tiny_spec(const std::string& out_dir) {
    ExperimentSpec spec;
    spec.tx.n_symbols = 1 << 13;
    spec.tx.decorrelation_delays_m = {0, 2, 3, 5, 6, 8};
    spec.link.n_sections = 8;
    spec.link.mdl_grid_points = 33;
    spec.link.target_mdl_db = 2.0;
    spec.link.span_loss_db = 10.0; // quiet link -> high SNR
    spec.link.snr_ceiling_enabled = false;
    spec.eq.n_taps = 31;
    spec.eq.n_train_symbols = 2500;
    spec.eq.train_passes = 2;
    spec.guard_symbols = 600;
    spec.sweep_dbm = {2.0};
    spec.rx_subsets = {6};
    spec.n_captures = 1;
    spec.freq_offset_hz = 10e6;
    spec.output_dir = out_dir;
    return spec;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string tmp_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("mdmsim_test_" + name);
    fs::remove_all(p);
    return p.string();
}

} // namespace

TEST_CASE("parse_spec: empty config resolves to the paper6 defaults") {
    std::vector<ValidationIssue> issues;
    const ExperimentSpec spec = parse_spec("{}", issues);
    CHECK(issues.empty());
    CHECK(spec.tx.active_modes.size() == 6);
    CHECK(spec.tx.baud_hz == doctest::Approx(33.33e9));
    CHECK(spec.tx.n_symbols == (1 << 16));
    CHECK(spec.link.target_mdl_db == doctest::Approx(11.0));
    CHECK(spec.kk.lo_offset_hz == doctest::Approx(18.5e9));
    CHECK(spec.fec.code_rate == doctest::Approx(0.8402));
    CHECK(spec.fec.ngmi_threshold == doctest::Approx(0.8798));
    CHECK(spec.n_captures == 5);
    CHECK(spec.rx_subsets == std::vector<int>{6});
}

TEST_CASE("parse_spec: violations are collected with field paths") {
    std::vector<ValidationIssue> issues;
    (void)parse_spec(R"({"tx": {"rrc": {"roll_off": 1.5}}, "rx_subsets": [7], "n_captures": 0})",
                     issues);
    REQUIRE(!issues.empty());
    bool saw_rolloff = false, saw_subset = false, saw_captures = false;
    for (const auto& i : issues) {
        if (i.path == "tx.rrc.roll_off" && i.message.find("[0, 1]") != std::string::npos)
            saw_rolloff = true;
        if (i.path == "rx_subsets" && i.message.find("6-mode") != std::string::npos)
            saw_subset = true;
        if (i.path == "n_captures") saw_captures = true;
    }
    CHECK(saw_rolloff);
    CHECK(saw_subset);
    CHECK(saw_captures);
}

TEST_CASE("parse_spec: syntax errors carry line and column") {
    std::vector<ValidationIssue> issues;
    (void)parse_spec("{\n  \"tx\": {,}\n}", issues);
    REQUIRE(!issues.empty());
    CHECK(issues.front().message.find("line 2") != std::string::npos);
    CHECK(issues.front().message.find("column") != std::string::npos);
}

TEST_CASE("parse_spec: unknown keys are reported") {
    std::vector<ValidationIssue> issues;
    (void)parse_spec(R"({"tx": {"bawd_hz": 1e9}})", issues);
    bool saw = false;
    for (const auto& i : issues)
        if (i.path == "tx.bawd_hz" && i.message == "unknown field") saw = true;
    CHECK(saw);
}

TEST_CASE("presets: names and the 3-mode variant") {
    CHECK(preset_names() == std::vector<std::string>{"paper6", "paper3"});
    const ExperimentSpec p3 = preset_spec("paper3");
    CHECK(p3.tx.active_modes ==
          std::vector<SpatialMode>{SpatialMode::LP01, SpatialMode::LP11a, SpatialMode::LP11b});
    CHECK(p3.rx_subsets == std::vector<int>{3, 4, 5, 6});
    CHECK_THROWS_AS(preset_spec("paper9"), std::invalid_argument);
}

TEST_CASE("spec json round trip") {
    ExperimentSpec spec = tiny_spec("roundtrip");
    spec.base_seed = 1234;
    const std::string text = spec_to_json(spec);
    std::vector<ValidationIssue> issues;
    const ExperimentSpec back = parse_spec(text, issues);
    CHECK(issues.empty());
    CHECK(spec_to_json(back) == text);
}

TEST_CASE("run_experiment: near-noiseless sanity run") {
    const std::string out = tmp_dir("sanity");
    ExperimentSpec spec = tiny_spec(out);
    // Three modes keep the butterfly small enough to converge within the
    // short frame's training budget.
    spec.tx.active_modes = {SpatialMode::LP01, SpatialMode::LP11a, SpatialMode::LP11b};
    spec.rx_subsets = {3};
    spec.link.inter_group_xt_db = -1000.0;
    const ResultSet rs = run_experiment(spec);
    CHECK(rs.failure_count() == 0);
    REQUIRE(rs.captures.size() == 1);
    const MetricsReport& r = rs.captures.front().report;
    for (double g : r.gmi_per_mode) CHECK(g > 2.95);
    CHECK(r.ngmi > 0.98);
    CHECK_FALSE(r.below_fec);
    // Residual offset impairment was estimated and compensated.
    CHECK(r.freq_offset_hz == doctest::Approx(10e6).epsilon(1e6 / 10e6));

    CHECK(fs::exists(fs::path(out) / "results.csv"));
    CHECK(fs::exists(fs::path(out) / "config.json"));
    CHECK(fs::exists(fs::path(out) / "summary.txt"));
    CHECK(fs::exists(fs::path(out) / "reports" / "report_p2_k3.json"));

    // Row contract: (modes + all) per capture point plus the averaged block.
    const std::string csv = slurp(fs::path(out) / "results.csv");
    std::size_t rows = 0;
    for (char c : csv)
        if (c == '\n') ++rows;
    CHECK(rows == 1 + 2 * (3 + 1));
}

TEST_CASE("run_experiment: determinism and seed-axis isolation") {
    const std::string out_a = tmp_dir("det_a");
    const std::string out_b = tmp_dir("det_b");
    ExperimentSpec a = tiny_spec(out_a);
    a.sweep_dbm = {2.0, 6.0};
    a.n_captures = 2;
    ExperimentSpec b = a;
    b.output_dir = out_b;
    b.jobs = 2;

    (void)run_experiment(a);
    (void)run_experiment(b);
    // Byte-identical CSV regardless of worker count.
    CHECK(slurp(fs::path(out_a) / "results.csv") == slurp(fs::path(out_b) / "results.csv"));

    // Adding captures must not change capture 0 rows.
    const std::string out_c = tmp_dir("det_c");
    ExperimentSpec c = a;
    c.output_dir = out_c;
    c.n_captures = 1;
    (void)run_experiment(c);
    const std::string csv_a = slurp(fs::path(out_a) / "results.csv");
    std::stringstream sa(slurp(fs::path(out_c) / "results.csv"));
    std::string line;
    std::getline(sa, line); // header
    while (std::getline(sa, line)) {
        if (line.find(",avg,") != std::string::npos) continue;
        CHECK(csv_a.find(line) != std::string::npos);
    }
}

TEST_CASE("run_experiment: per-point failures are recorded, run continues") {
    const std::string out = tmp_dir("fail");
    ExperimentSpec spec = tiny_spec(out);
    // A hostile fixed bias leaves the biased photocurrent non-positive.
    spec.kk.bias_fixed = true;
    spec.kk.dc_bias = 1e-6;
    const ResultSet rs = run_experiment(spec);
    CHECK(rs.failure_count() == static_cast<int>(rs.captures.size()));
    const std::string csv = slurp(fs::path(out) / "results.csv");
    CHECK(csv.find("failed") != std::string::npos);
    const std::string summary = slurp(fs::path(out) / "summary.txt");
    CHECK(summary.find("failures: 1") != std::string::npos);
}

TEST_CASE("export_plotdata: tidy rows, grids, idempotence") {
    const std::string out = tmp_dir("export");
    ExperimentSpec spec = tiny_spec(out);
    spec.sweep_dbm = {0.0, 4.0};
    const ResultSet rs = run_experiment(spec);
    REQUIRE(rs.failure_count() == 0);

    const auto files = export_plotdata(out, "gmi_vs_power");
    REQUIRE(files.size() == 1);
    const std::string tidy = slurp(files.front());
    // 2 powers x (6 modes + all) x (1 capture + average) data rows + header.
    std::size_t rows = 0;
    for (char c : tidy)
        if (c == '\n') ++rows;
    CHECK(rows == 1 + 2 * 7 * 2);
    CHECK(tidy.find("power_dbm,mode,k_rx,capture,metric,value") == 0);

    const auto mdl_files = export_plotdata(out, "mdl_vs_power");
    CHECK(mdl_files.size() == 1);

    const auto xt_files = export_plotdata(out, "xt_matrix");
    REQUIRE(xt_files.size() == 4); // spatial + group per power
    const std::string spatial = slurp(xt_files.front());
    std::size_t lines = 0;
    for (char c : spatial)
        if (c == '\n') ++lines;
    CHECK(lines == 7); // header + 6 received modes

    const std::string before = slurp(files.front());
    (void)export_plotdata(out, "gmi_vs_power");
    CHECK(slurp(files.front()) == before);

    CHECK_THROWS_AS((void)export_plotdata(out, "sausage"), std::invalid_argument);
}
