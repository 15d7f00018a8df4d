// SPDX-License-Identifier: Apache-2.0
//
// mdmsim command line: drives the simulator through the C API only.
//
//   mdmsim run <config|preset> [--seed N] [--jobs N] [--out DIR] [--dump-matrices]
//   mdmsim validate <config>
//   mdmsim export <results_dir> --figure <id> [--out DIR]
//   mdmsim presets
//
// Exit codes: 0 success, 1 configuration error, 2 runtime failures present.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "mdmsim.h"

namespace {

bool read_file(const std::string& path, std::string& out) {
    std::ifstream in(path);
    if (!in) return false;
    std::stringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return true;
}

bool is_preset(const std::string& name) {
    const std::string names = mdmsim_preset_names_json();
    return names.find("\"" + name + "\"") != std::string::npos;
}

struct ScopedString {
    char* s = nullptr;
    ~ScopedString() { mdmsim_string_free(s); }
};

struct ScopedSpec {
    mdmsim_spec* p = nullptr;
    ~ScopedSpec() { mdmsim_spec_free(p); }
};

struct ScopedResult {
    mdmsim_result* p = nullptr;
    ~ScopedResult() { mdmsim_result_free(p); }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mode-multiplexed optical link simulator"};
    app.require_subcommand(1);

    std::string config_arg, out_dir, figure;
    std::uint64_t seed = 0;
    bool seed_set = false, dump_matrices = false;
    int jobs = 0;

    CLI::App* run = app.add_subcommand("run", "run an experiment from a config file or preset");
    run->add_option("config", config_arg, "config JSON path, preset name, or '-' for stdin")
        ->required();
    run->add_option("--seed", seed, "override the base seed")->each([&](const std::string&) {
        seed_set = true;
    });
    run->add_option("--jobs", jobs, "worker threads for sweep points");
    run->add_option("--out", out_dir, "output directory override");
    run->add_flag("--dump-matrices", dump_matrices, "store channel and tap matrices");

    CLI::App* validate = app.add_subcommand("validate", "check a config file and report issues");
    validate->add_option("config", config_arg, "config JSON path or '-' for stdin")->required();

    CLI::App* exp = app.add_subcommand("export", "emit plot data from a results directory");
    exp->add_option("results", config_arg, "results directory of a previous run")->required();
    exp->add_option("--figure", figure, "gmi_vs_power | mdl_vs_power | xt_matrix")->required();
    exp->add_option("--out", out_dir, "directory for the exported files");

    app.add_subcommand("presets", "list built-in presets");

    CLI11_PARSE(app, argc, argv);

    if (app.got_subcommand("presets")) {
        std::printf("%s\n", mdmsim_preset_names_json());
        return 0;
    }

    if (app.got_subcommand("validate")) {
        std::string text;
        if (config_arg == "-") {
            std::stringstream ss;
            ss << std::cin.rdbuf();
            text = ss.str();
        } else if (!read_file(config_arg, text)) {
            std::fprintf(stderr, "error: cannot read %s\n", config_arg.c_str());
            return 1;
        }
        ScopedString report;
        const mdmsim_status st = mdmsim_validate_json(text.c_str(), &report.s);
        if (report.s) std::printf("%s\n", report.s);
        if (st == MDMSIM_OK) {
            std::printf("config ok\n");
            return 0;
        }
        std::fprintf(stderr, "invalid config: %s\n", mdmsim_last_error());
        return 1;
    }

    if (app.got_subcommand("export")) {
        ScopedString files;
        const mdmsim_status st =
            mdmsim_export_figure(config_arg.c_str(), figure.c_str(),
                                 out_dir.empty() ? nullptr : out_dir.c_str(), &files.s);
        if (st != MDMSIM_OK) {
            std::fprintf(stderr, "export failed: %s\n", mdmsim_last_error());
            return st == MDMSIM_ERR_INVALID_ARGUMENT ? 1 : 2;
        }
        std::printf("%s\n", files.s);
        return 0;
    }

    // run
    ScopedSpec spec;
    if (config_arg != "-" && is_preset(config_arg)) {
        if (mdmsim_spec_from_preset(config_arg.c_str(), &spec.p) != MDMSIM_OK) {
            std::fprintf(stderr, "error: %s\n", mdmsim_last_error());
            return 1;
        }
    } else {
        std::string text;
        if (config_arg == "-") {
            std::stringstream ss;
            ss << std::cin.rdbuf();
            text = ss.str();
        } else if (!read_file(config_arg, text)) {
            std::fprintf(stderr, "error: cannot read %s\n", config_arg.c_str());
            return 1;
        }
        if (mdmsim_spec_from_json(text.c_str(), &spec.p) != MDMSIM_OK) {
            std::fprintf(stderr, "invalid config: %s\n", mdmsim_last_error());
            return 1;
        }
    }

    if (seed_set) mdmsim_spec_set_seed(spec.p, seed);
    if (jobs > 0) mdmsim_spec_set_jobs(spec.p, jobs);
    if (!out_dir.empty()) mdmsim_spec_set_output_dir(spec.p, out_dir.c_str());
    if (dump_matrices) mdmsim_spec_set_dump_matrices(spec.p, 1);

    ScopedResult result;
    if (mdmsim_run(spec.p, &result.p) != MDMSIM_OK) {
        std::fprintf(stderr, "run failed: %s\n", mdmsim_last_error());
        return 1;
    }
    ScopedString summary;
    if (mdmsim_result_summary_json(result.p, &summary.s) == MDMSIM_OK)
        std::printf("%s\n", summary.s);
    const int failures = mdmsim_result_failure_count(result.p);
    if (failures > 0) {
        std::fprintf(stderr, "%d point(s) failed; see the results CSV\n", failures);
        return 2;
    }
    return 0;
}
