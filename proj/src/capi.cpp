// SPDX-License-Identifier: Apache-2.0
#include "mdmsim.h"

#include <json.hpp>

#include <cstring>
#include <string>

#include "mdmsim/config.hpp"
#include "mdmsim/experiment.hpp"

using nlohmann::json;

struct mdmsim_spec {
    mdmsim::ExperimentSpec spec;
};

struct mdmsim_result {
    mdmsim::ResultSet results;
};

namespace {

thread_local std::string g_last_error = "";

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

mdmsim_status fail(mdmsim_status code, const std::string& msg) {
    g_last_error = msg;
    return code;
}

json issues_to_json(const std::vector<mdmsim::ValidationIssue>& issues) {
    json arr = json::array();
    for (const auto& i : issues) arr.push_back({{"path", i.path}, {"message", i.message}});
    return arr;
}

bool is_syntax_issue(const std::vector<mdmsim::ValidationIssue>& issues) {
    for (const auto& i : issues)
        if (i.path.empty() && i.message.rfind("syntax error", 0) == 0) return true;
    return false;
}

} // namespace

extern "C" {

const char* mdmsim_version(void) { return "0.1.0"; }

const char* mdmsim_last_error(void) { return g_last_error.c_str(); }

const char* mdmsim_preset_names_json(void) {
    static const std::string names = [] {
        json arr = json::array();
        for (const auto& n : mdmsim::preset_names()) arr.push_back(n);
        return arr.dump();
    }();
    return names.c_str();
}

mdmsim_status mdmsim_spec_from_json(const char* json_utf8, mdmsim_spec** out) {
    if (!out) return fail(MDMSIM_ERR_INVALID_ARGUMENT, "out must not be NULL");
    *out = nullptr;
    try {
        std::vector<mdmsim::ValidationIssue> issues;
        mdmsim::ExperimentSpec spec = mdmsim::parse_spec(json_utf8 ? json_utf8 : "", issues);
        if (!issues.empty()) {
            std::string msg;
            for (const auto& i : issues) {
                if (!msg.empty()) msg += "; ";
                msg += mdmsim::to_string(i);
            }
            return fail(is_syntax_issue(issues) ? MDMSIM_ERR_PARSE : MDMSIM_ERR_VALIDATION, msg);
        }
        *out = new mdmsim_spec{std::move(spec)};
        return MDMSIM_OK;
    } catch (const std::exception& e) {
        return fail(MDMSIM_ERR_RUNTIME, e.what());
    }
}

mdmsim_status mdmsim_spec_from_preset(const char* name, mdmsim_spec** out) {
    if (!out) return fail(MDMSIM_ERR_INVALID_ARGUMENT, "out must not be NULL");
    *out = nullptr;
    try {
        *out = new mdmsim_spec{mdmsim::preset_spec(name ? name : "")};
        return MDMSIM_OK;
    } catch (const std::exception& e) {
        return fail(MDMSIM_ERR_INVALID_ARGUMENT, e.what());
    }
}

mdmsim_status mdmsim_validate_json(const char* json_utf8, char** report_json_out) {
    if (report_json_out) *report_json_out = nullptr;
    try {
        std::vector<mdmsim::ValidationIssue> issues;
        (void)mdmsim::parse_spec(json_utf8 ? json_utf8 : "", issues);
        if (report_json_out) *report_json_out = dup_string(issues_to_json(issues).dump(2));
        if (issues.empty()) return MDMSIM_OK;
        std::string msg = std::to_string(issues.size()) + " issue(s): " +
                          mdmsim::to_string(issues.front());
        return fail(is_syntax_issue(issues) ? MDMSIM_ERR_PARSE : MDMSIM_ERR_VALIDATION, msg);
    } catch (const std::exception& e) {
        return fail(MDMSIM_ERR_RUNTIME, e.what());
    }
}

mdmsim_status mdmsim_spec_to_json(const mdmsim_spec* spec, char** json_out) {
    if (!spec || !json_out) return fail(MDMSIM_ERR_INVALID_ARGUMENT, "NULL argument");
    try {
        *json_out = dup_string(mdmsim::spec_to_json(spec->spec));
        return MDMSIM_OK;
    } catch (const std::exception& e) {
        return fail(MDMSIM_ERR_RUNTIME, e.what());
    }
}

mdmsim_status mdmsim_spec_set_seed(mdmsim_spec* spec, uint64_t seed) {
    if (!spec) return fail(MDMSIM_ERR_INVALID_ARGUMENT, "NULL spec");
    spec->spec.base_seed = seed;
    return MDMSIM_OK;
}

mdmsim_status mdmsim_spec_set_jobs(mdmsim_spec* spec, int jobs) {
    if (!spec) return fail(MDMSIM_ERR_INVALID_ARGUMENT, "NULL spec");
    if (jobs < 1) return fail(MDMSIM_ERR_INVALID_ARGUMENT, "jobs must be >= 1");
    spec->spec.jobs = jobs;
    return MDMSIM_OK;
}

mdmsim_status mdmsim_spec_set_output_dir(mdmsim_spec* spec, const char* dir) {
    if (!spec || !dir) return fail(MDMSIM_ERR_INVALID_ARGUMENT, "NULL argument");
    spec->spec.output_dir = dir;
    return MDMSIM_OK;
}

mdmsim_status mdmsim_spec_set_dump_matrices(mdmsim_spec* spec, int enable) {
    if (!spec) return fail(MDMSIM_ERR_INVALID_ARGUMENT, "NULL spec");
    spec->spec.dump_matrices = enable != 0;
    return MDMSIM_OK;
}

mdmsim_status mdmsim_run(const mdmsim_spec* spec, mdmsim_result** out) {
    if (!spec || !out) return fail(MDMSIM_ERR_INVALID_ARGUMENT, "NULL argument");
    *out = nullptr;
    try {
        mdmsim::ResultSet rs = mdmsim::run_experiment(spec->spec);
        *out = new mdmsim_result{std::move(rs)};
        return MDMSIM_OK;
    } catch (const std::invalid_argument& e) {
        return fail(MDMSIM_ERR_VALIDATION, e.what());
    } catch (const std::exception& e) {
        return fail(MDMSIM_ERR_RUNTIME, e.what());
    }
}

mdmsim_status mdmsim_result_summary_json(const mdmsim_result* result, char** json_out) {
    if (!result || !json_out) return fail(MDMSIM_ERR_INVALID_ARGUMENT, "NULL argument");
    try {
        json j;
        j["output_dir"] = result->results.output_dir;
        j["n_points"] = result->results.captures.size();
        j["n_failures"] = result->results.failures.size();
        j["failures"] = result->results.failures;
        json pts = json::array();
        for (const auto& pr : result->results.averaged) {
            json p;
            p["power_dbm"] = pr.power_dbm;
            p["k_rx"] = pr.k_rx;
            p["ok"] = pr.ok;
            if (pr.ok) {
                p["gmi_per_mode"] = pr.report.gmi_per_mode;
                p["ngmi"] = pr.report.ngmi;
                p["net_rate_gbps"] = pr.report.net_rate_gbps;
                p["mdl_db"] = pr.report.mdl_db;
            } else {
                p["error"] = pr.error;
            }
            pts.push_back(p);
        }
        j["averaged"] = pts;
        *json_out = dup_string(j.dump(2));
        return MDMSIM_OK;
    } catch (const std::exception& e) {
        return fail(MDMSIM_ERR_RUNTIME, e.what());
    }
}

int mdmsim_result_failure_count(const mdmsim_result* result) {
    return result ? result->results.failure_count() : -1;
}

mdmsim_status mdmsim_result_output_dir(const mdmsim_result* result, char** dir_out) {
    if (!result || !dir_out) return fail(MDMSIM_ERR_INVALID_ARGUMENT, "NULL argument");
    *dir_out = dup_string(result->results.output_dir);
    return MDMSIM_OK;
}

mdmsim_status mdmsim_export_figure(const char* results_dir, const char* figure_id,
                                   const char* out_dir, char** files_json_out) {
    if (files_json_out) *files_json_out = nullptr;
    if (!results_dir || !figure_id) return fail(MDMSIM_ERR_INVALID_ARGUMENT, "NULL argument");
    try {
        const auto files =
            mdmsim::export_plotdata(results_dir, figure_id, out_dir ? out_dir : "");
        if (files_json_out) {
            json arr = json::array();
            for (const auto& f : files) arr.push_back(f);
            *files_json_out = dup_string(arr.dump(2));
        }
        return MDMSIM_OK;
    } catch (const std::invalid_argument& e) {
        return fail(MDMSIM_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return fail(MDMSIM_ERR_IO, e.what());
    }
}

void mdmsim_spec_free(mdmsim_spec* spec) { delete spec; }
void mdmsim_result_free(mdmsim_result* result) { delete result; }
void mdmsim_string_free(char* s) { delete[] s; }

} // extern "C"
