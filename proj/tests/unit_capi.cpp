// SPDX-License-Identifier: Apache-2.0
//
// Exercises the shared-library C surface end to end: spec lifecycle,
// validation reports, a small run, export, and the error paths.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstring>
#include <filesystem>
#include <string>

#include "mdmsim.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Str {
    char* s = nullptr;
    ~Str() { mdmsim_string_free(s); }
};

const char* kTinyConfig = R"({
  "tx": {"n_symbols": 8192, "active_modes": ["LP01", "LP11a", "LP11b"],
          "decorrelation_delays_m": [0, 2, 3, 5, 6, 8]},
  "link": {"n_sections": 8, "mdl_grid_points": 33, "target_mdl_db": 2.0,
            "span_loss_db": 10.0, "snr_ceiling_enabled": false,
            "inter_group_xt_db": -1000.0},
  "eq": {"n_taps": 31, "n_train_symbols": 2500},
  "guard_symbols": 600,
  "sweep_dbm": [2.0],
  "rx_subsets": [3],
  "n_captures": 1,
  "freq_offset_hz": 0.0
})";

} // namespace

TEST_CASE("version and preset names") {
    CHECK(std::strlen(mdmsim_version()) > 0);
    const json names = json::parse(mdmsim_preset_names_json());
    REQUIRE(names.is_array());
    CHECK(names[0] == "paper6");
    CHECK(names[1] == "paper3");
}

TEST_CASE("validation: ok, semantic failure, syntax failure") {
    Str report;
    CHECK(mdmsim_validate_json("{}", &report.s) == MDMSIM_OK);
    CHECK(json::parse(report.s).empty());

    Str report2;
    CHECK(mdmsim_validate_json(R"({"tx": {"rrc": {"roll_off": 1.5}}})", &report2.s) ==
          MDMSIM_ERR_VALIDATION);
    const json issues = json::parse(report2.s);
    REQUIRE(!issues.empty());
    CHECK(issues[0]["path"] == "tx.rrc.roll_off");

    Str report3;
    CHECK(mdmsim_validate_json("{nope", &report3.s) == MDMSIM_ERR_PARSE);
    CHECK(std::string(mdmsim_last_error()).find("syntax") != std::string::npos);
}

TEST_CASE("spec lifecycle and json round trip") {
    mdmsim_spec* spec = nullptr;
    REQUIRE(mdmsim_spec_from_preset("paper3", &spec) == MDMSIM_OK);
    Str js;
    REQUIRE(mdmsim_spec_to_json(spec, &js.s) == MDMSIM_OK);
    const json j = json::parse(js.s);
    CHECK(j["tx"]["active_modes"].size() == 3);
    CHECK(j["rx_subsets"] == json::array({3, 4, 5, 6}));
    mdmsim_spec_free(spec);

    mdmsim_spec* bad = nullptr;
    CHECK(mdmsim_spec_from_preset("paper9", &bad) == MDMSIM_ERR_INVALID_ARGUMENT);
    CHECK(bad == nullptr);
    CHECK(std::string(mdmsim_last_error()).find("paper9") != std::string::npos);

    CHECK(mdmsim_spec_from_json(R"({"jobs": 0})", &bad) == MDMSIM_ERR_VALIDATION);
    CHECK(bad == nullptr);
}

TEST_CASE("null-argument handling") {
    CHECK(mdmsim_spec_from_json("{}", nullptr) == MDMSIM_ERR_INVALID_ARGUMENT);
    CHECK(mdmsim_run(nullptr, nullptr) == MDMSIM_ERR_INVALID_ARGUMENT);
    CHECK(mdmsim_result_failure_count(nullptr) == -1);
    mdmsim_string_free(nullptr);
    mdmsim_spec_free(nullptr);
    mdmsim_result_free(nullptr);
}

TEST_CASE("run and export through the C surface") {
    const fs::path out = fs::temp_directory_path() / "mdmsim_capi_run";
    fs::remove_all(out);

    mdmsim_spec* spec = nullptr;
    REQUIRE(mdmsim_spec_from_json(kTinyConfig, &spec) == MDMSIM_OK);
    REQUIRE(mdmsim_spec_set_seed(spec, 77) == MDMSIM_OK);
    REQUIRE(mdmsim_spec_set_jobs(spec, 1) == MDMSIM_OK);
    REQUIRE(mdmsim_spec_set_output_dir(spec, out.c_str()) == MDMSIM_OK);

    mdmsim_result* result = nullptr;
    REQUIRE(mdmsim_run(spec, &result) == MDMSIM_OK);
    CHECK(mdmsim_result_failure_count(result) == 0);

    Str dir;
    REQUIRE(mdmsim_result_output_dir(result, &dir.s) == MDMSIM_OK);
    CHECK(std::string(dir.s) == out.string());

    Str summary;
    REQUIRE(mdmsim_result_summary_json(result, &summary.s) == MDMSIM_OK);
    const json s = json::parse(summary.s);
    CHECK(s["n_failures"] == 0);
    REQUIRE(s["averaged"].size() == 1);
    CHECK(s["averaged"][0]["ngmi"].get<double>() > 0.98);

    Str files;
    REQUIRE(mdmsim_export_figure(out.c_str(), "gmi_vs_power", nullptr, &files.s) == MDMSIM_OK);
    const json fl = json::parse(files.s);
    REQUIRE(fl.size() == 1);
    CHECK(fs::exists(fl[0].get<std::string>()));

    CHECK(mdmsim_export_figure(out.c_str(), "sausage", nullptr, nullptr) ==
          MDMSIM_ERR_INVALID_ARGUMENT);

    mdmsim_result_free(result);
    mdmsim_spec_free(spec);
}
