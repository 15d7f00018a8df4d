// SPDX-License-Identifier: Apache-2.0
#include "mdmsim/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>
#include <sstream>

namespace mdmsim {

using nlohmann::json;

ExperimentSpec::ExperimentSpec() {
    // Pipeline default: the receiver optimizes the restored DC bias.
    kk.bias_fixed = false;
}

std::string to_string(const ValidationIssue& issue) {
    return issue.path.empty() ? issue.message : issue.path + ": " + issue.message;
}

namespace {

struct Loader {
    std::vector<ValidationIssue>& issues;

    void complain(const std::string& path, const std::string& msg) {
        issues.push_back({path, msg});
    }

    void check_keys(const json& j, const std::string& path, const std::set<std::string>& known) {
        if (!j.is_object()) return;
        for (const auto& kv : j.items())
            if (!known.count(kv.key()))
                complain(path.empty() ? kv.key() : path + "." + kv.key(), "unknown field");
    }

    template <typename T>
    void num(const json& j, const std::string& path, const char* key, T& target) {
        if (!j.contains(key)) return;
        const json& v = j.at(key);
        if (!v.is_number() && !(std::is_same_v<T, bool> && v.is_boolean())) {
            complain(path + key, "expected a number");
            return;
        }
        target = v.get<T>();
    }

    void boolean(const json& j, const std::string& path, const char* key, bool& target) {
        if (!j.contains(key)) return;
        if (!j.at(key).is_boolean()) {
            complain(path + key, "expected a boolean");
            return;
        }
        target = j.at(key).get<bool>();
    }

    void str(const json& j, const std::string& path, const char* key, std::string& target) {
        if (!j.contains(key)) return;
        if (!j.at(key).is_string()) {
            complain(path + key, "expected a string");
            return;
        }
        target = j.at(key).get<std::string>();
    }

    template <typename T>
    void num_list(const json& j, const std::string& path, const char* key, std::vector<T>& target) {
        if (!j.contains(key)) return;
        const json& v = j.at(key);
        if (!v.is_array()) {
            complain(path + key, "expected an array of numbers");
            return;
        }
        std::vector<T> out;
        for (const auto& e : v) {
            if (!e.is_number()) {
                complain(path + key, "expected an array of numbers");
                return;
            }
            out.push_back(e.get<T>());
        }
        target = std::move(out);
    }
};

void load_tx(Loader& ld, const json& j, TxConfig& tx) {
    ld.check_keys(j, "tx",
                  {"baud_hz", "samples_per_symbol", "n_symbols", "rrc", "active_modes",
                   "decorrelation_delays_m", "pre_emphasis", "group_index"});
    ld.num(j, "tx.", "baud_hz", tx.baud_hz);
    ld.num(j, "tx.", "samples_per_symbol", tx.samples_per_symbol);
    ld.num(j, "tx.", "n_symbols", tx.n_symbols);
    ld.num(j, "tx.", "group_index", tx.group_index);
    if (j.contains("rrc")) {
        const json& r = j.at("rrc");
        ld.check_keys(r, "tx.rrc", {"roll_off", "span_symbols"});
        ld.num(r, "tx.rrc.", "roll_off", tx.rrc.roll_off);
        ld.num(r, "tx.rrc.", "span_symbols", tx.rrc.span_symbols);
    }
    tx.rrc.samples_per_symbol = tx.samples_per_symbol;
    if (j.contains("active_modes")) {
        const json& a = j.at("active_modes");
        if (!a.is_array()) {
            ld.complain("tx.active_modes", "expected an array of mode names");
        } else {
            std::vector<SpatialMode> modes;
            bool ok = true;
            for (const auto& e : a) {
                if (!e.is_string()) {
                    ld.complain("tx.active_modes", "expected an array of mode names");
                    ok = false;
                    break;
                }
                try {
                    modes.push_back(mode_from_name(e.get<std::string>()));
                } catch (const std::exception& ex) {
                    ld.complain("tx.active_modes", ex.what());
                    ok = false;
                }
            }
            if (ok) tx.active_modes = std::move(modes);
        }
    }
    ld.num_list(j, "tx.", "decorrelation_delays_m", tx.decorrelation_delays_m);
    if (j.contains("pre_emphasis") && !j.at("pre_emphasis").is_null()) {
        const json& p = j.at("pre_emphasis");
        ld.check_keys(p, "tx.pre_emphasis", {"freq_hz", "gain"});
        PreEmphasisCurve curve;
        ld.num_list(p, "tx.pre_emphasis.", "freq_hz", curve.freq_hz);
        ld.num_list(p, "tx.pre_emphasis.", "gain", curve.gain);
        tx.pre_emphasis = std::move(curve);
    }
}

void load_link(Loader& ld, const json& j, LinkConfig& link) {
    ld.check_keys(j, "link",
                  {"n_modes", "n_sections", "target_mdl_db", "mode_groups", "inter_group_xt_db",
                   "dmgd_ps_per_km", "cd_ps2_per_km", "length_km", "span_loss_db",
                   "amp_noise_figure_db", "ase_reference_db", "snr_ceiling_enabled",
                   "snr_ceiling_db", "nl_ref_dbm", "mdl_grid_points", "mdl_band_hz"});
    ld.num(j, "link.", "n_modes", link.n_modes_link);
    ld.num(j, "link.", "n_sections", link.n_sections);
    ld.num(j, "link.", "target_mdl_db", link.target_mdl_db);
    ld.num_list(j, "link.", "mode_groups", link.mode_group_of_mode);
    ld.num(j, "link.", "inter_group_xt_db", link.inter_group_xt_db);
    ld.num_list(j, "link.", "dmgd_ps_per_km", link.dmgd_ps_per_km);
    ld.num(j, "link.", "cd_ps2_per_km", link.cd_ps2_per_km);
    ld.num(j, "link.", "length_km", link.length_km);
    ld.num(j, "link.", "span_loss_db", link.span_loss_db);
    ld.num(j, "link.", "amp_noise_figure_db", link.amp_noise_figure_db);
    ld.num(j, "link.", "ase_reference_db", link.ase_reference_db);
    ld.boolean(j, "link.", "snr_ceiling_enabled", link.snr_ceiling_enabled);
    ld.num(j, "link.", "snr_ceiling_db", link.snr_ceiling_db);
    ld.num(j, "link.", "nl_ref_dbm", link.nl_ref_dbm);
    ld.num(j, "link.", "mdl_grid_points", link.mdl_grid_points);
    ld.num(j, "link.", "mdl_band_hz", link.mdl_band_hz);
}

void load_kk(Loader& ld, const json& j, KkConfig& kk) {
    ld.check_keys(j, "kk",
                  {"lo_offset_hz", "cspr_db", "adc_rate_hz", "analog_bandwidth_hz",
                   "internal_oversampling", "output_lowpass_hz", "bias_search", "dc_bias",
                   "bias_low_rel", "bias_high_rel", "bias_tol_rel", "pilot_samples"});
    ld.num(j, "kk.", "lo_offset_hz", kk.lo_offset_hz);
    ld.num(j, "kk.", "cspr_db", kk.cspr_db);
    ld.num(j, "kk.", "adc_rate_hz", kk.adc_rate_hz);
    ld.num(j, "kk.", "analog_bandwidth_hz", kk.analog_bandwidth_hz);
    ld.num(j, "kk.", "internal_oversampling", kk.internal_oversampling);
    ld.num(j, "kk.", "output_lowpass_hz", kk.output_lowpass_hz);
    ld.num(j, "kk.", "dc_bias", kk.dc_bias);
    ld.num(j, "kk.", "bias_low_rel", kk.bias_low_rel);
    ld.num(j, "kk.", "bias_high_rel", kk.bias_high_rel);
    ld.num(j, "kk.", "bias_tol_rel", kk.bias_tol_rel);
    ld.num(j, "kk.", "pilot_samples", kk.pilot_samples);
    if (j.contains("bias_search")) {
        std::string mode;
        ld.str(j, "kk.", "bias_search", mode);
        if (mode == "fixed")
            kk.bias_fixed = true;
        else if (mode == "golden-section")
            kk.bias_fixed = false;
        else if (!mode.empty())
            ld.complain("kk.bias_search", "must be 'fixed' or 'golden-section'");
    }
}

void load_eq(Loader& ld, const json& j, EqualizerConfig& eq) {
    ld.check_keys(j, "eq",
                  {"n_taps", "step_train", "step_dd", "bps_test_phases", "bps_window",
                   "n_train_symbols", "train_passes"});
    ld.num(j, "eq.", "n_taps", eq.n_taps);
    ld.num(j, "eq.", "step_train", eq.step_train);
    ld.num(j, "eq.", "step_dd", eq.step_dd);
    ld.num(j, "eq.", "bps_test_phases", eq.bps_test_phases);
    ld.num(j, "eq.", "bps_window", eq.bps_window);
    ld.num(j, "eq.", "n_train_symbols", eq.n_train_symbols);
    ld.num(j, "eq.", "train_passes", eq.train_passes);
}

void locate(const std::string& text, std::size_t byte, std::size_t& line, std::size_t& col) {
    line = 1;
    col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
}

} // namespace

std::vector<ValidationIssue> validate_spec(const ExperimentSpec& spec) {
    std::vector<ValidationIssue> issues;
    const auto guard = [&](const char* path, const auto& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            issues.push_back({path, e.what()});
        }
    };

    if (spec.tx.rrc.roll_off < 0.0 || spec.tx.rrc.roll_off > 1.0)
        issues.push_back({"tx.rrc.roll_off",
                          std::to_string(spec.tx.rrc.roll_off) + " outside [0, 1]"});
    else
        guard("tx", [&] { spec.tx.validate(); });
    guard("link", [&] { spec.link.validate(); });
    guard("kk", [&] { spec.kk.validate(); });
    guard("eq", [&] { spec.eq.validate(); });
    guard("fec", [&] { spec.fec.validate(); });

    if (spec.sweep_dbm.empty()) issues.push_back({"sweep_dbm", "sweep must not be empty"});
    if (spec.n_captures < 1) issues.push_back({"n_captures", "must be >= 1"});
    if (spec.guard_symbols < 0) issues.push_back({"guard_symbols", "must be >= 0"});
    if (spec.jobs < 1) issues.push_back({"jobs", "must be >= 1"});

    const int tx_modes = static_cast<int>(spec.tx.active_modes.size());
    if (spec.rx_subsets.empty()) issues.push_back({"rx_subsets", "must not be empty"});
    for (int k : spec.rx_subsets) {
        if (k > spec.link.n_modes_link)
            issues.push_back({"rx_subsets", std::to_string(k) + " exceeds the " +
                                                std::to_string(spec.link.n_modes_link) +
                                                "-mode link"});
        else if (k < tx_modes)
            issues.push_back({"rx_subsets", std::to_string(k) +
                                                " receivers cannot decode " +
                                                std::to_string(tx_modes) + " transmitted modes"});
    }
    if (tx_modes > spec.link.n_modes_link)
        issues.push_back({"tx.active_modes", "more transmitted modes than the link supports"});

    // Enough symbols must survive guards and training for the GMI estimate.
    const int usable = spec.tx.n_symbols - 2 * spec.guard_symbols - spec.eq.n_train_symbols;
    if (usable < 1000)
        issues.push_back({"eq.n_train_symbols",
                          "guards plus training leave " + std::to_string(usable) +
                              " measurement symbols; need >= 1000"});

    // Decorrelation shifts are cyclic: when one approaches the frame period
    // two launch paths carry nearly the same data and can no longer be
    // separated. Keep the largest delay well inside the frame.
    {
        constexpr double kSpeedOfLight = 299792458.0;
        double max_m = 0.0;
        for (SpatialMode mode : spec.tx.active_modes) {
            const std::size_t port = static_cast<std::size_t>(mode);
            if (port < spec.tx.decorrelation_delays_m.size())
                max_m = std::max(max_m, spec.tx.decorrelation_delays_m[port]);
        }
        const double max_symbols = max_m * spec.tx.group_index / kSpeedOfLight * spec.tx.baud_hz;
        if (max_symbols > spec.tx.n_symbols / 3.0)
            issues.push_back({"tx.decorrelation_delays_m",
                              "largest delay spans " + std::to_string(static_cast<long long>(max_symbols)) +
                                  " symbols; must stay under a third of n_symbols (" +
                                  std::to_string(spec.tx.n_symbols) + ")"});
    }

    if (spec.freq_offset_hz != 0.0 && std::abs(spec.freq_offset_hz) > 200e6)
        issues.push_back({"freq_offset_hz", "|offset| above the 200 MHz estimator range"});
    return issues;
}

ExperimentSpec parse_spec(const std::string& json_text, std::vector<ValidationIssue>& issues) {
    ExperimentSpec spec;
    json j;
    try {
        j = json_text.empty() ? json::object() : json::parse(json_text);
    } catch (const json::parse_error& e) {
        std::size_t line = 0, col = 0;
        locate(json_text, e.byte > 0 ? e.byte - 1 : 0, line, col);
        issues.push_back({"", "syntax error at line " + std::to_string(line) + ", column " +
                                  std::to_string(col) + ": " + e.what()});
        return spec;
    }
    if (!j.is_object()) {
        issues.push_back({"", "top level must be a JSON object"});
        return spec;
    }

    Loader ld{issues};
    ld.check_keys(j, "",
                  {"preset", "tx", "link", "kk", "eq", "fec", "sweep_dbm", "rx_subsets",
                   "n_captures", "base_seed", "freq_offset_hz", "guard_symbols", "output_dir",
                   "jobs", "dump_matrices"});

    if (j.contains("preset")) {
        std::string name;
        ld.str(j, "", "preset", name);
        try {
            spec = preset_spec(name);
        } catch (const std::exception& e) {
            ld.complain("preset", e.what());
        }
    }

    if (j.contains("tx")) load_tx(ld, j.at("tx"), spec.tx);
    if (j.contains("link")) load_link(ld, j.at("link"), spec.link);
    if (j.contains("kk")) load_kk(ld, j.at("kk"), spec.kk);
    if (j.contains("eq")) load_eq(ld, j.at("eq"), spec.eq);
    if (j.contains("fec")) {
        const json& f = j.at("fec");
        ld.check_keys(f, "fec", {"code_rate", "ngmi_threshold"});
        ld.num(f, "fec.", "code_rate", spec.fec.code_rate);
        ld.num(f, "fec.", "ngmi_threshold", spec.fec.ngmi_threshold);
    }
    ld.num_list(j, "", "sweep_dbm", spec.sweep_dbm);
    ld.num_list(j, "", "rx_subsets", spec.rx_subsets);
    ld.num(j, "", "n_captures", spec.n_captures);
    ld.num(j, "", "base_seed", spec.base_seed);
    ld.num(j, "", "freq_offset_hz", spec.freq_offset_hz);
    ld.num(j, "", "guard_symbols", spec.guard_symbols);
    ld.str(j, "", "output_dir", spec.output_dir);
    ld.num(j, "", "jobs", spec.jobs);
    ld.boolean(j, "", "dump_matrices", spec.dump_matrices);

    const auto semantic = validate_spec(spec);
    issues.insert(issues.end(), semantic.begin(), semantic.end());
    return spec;
}

std::string spec_to_json(const ExperimentSpec& spec) {
    json j;
    j["preset"] = spec.preset_name;
    json tx;
    tx["baud_hz"] = spec.tx.baud_hz;
    tx["samples_per_symbol"] = spec.tx.samples_per_symbol;
    tx["n_symbols"] = spec.tx.n_symbols;
    tx["rrc"] = {{"roll_off", spec.tx.rrc.roll_off}, {"span_symbols", spec.tx.rrc.span_symbols}};
    json modes = json::array();
    for (SpatialMode m : spec.tx.active_modes) modes.push_back(mode_name(m));
    tx["active_modes"] = modes;
    tx["decorrelation_delays_m"] = spec.tx.decorrelation_delays_m;
    if (spec.tx.pre_emphasis)
        tx["pre_emphasis"] = {{"freq_hz", spec.tx.pre_emphasis->freq_hz},
                              {"gain", spec.tx.pre_emphasis->gain}};
    else
        tx["pre_emphasis"] = nullptr;
    tx["group_index"] = spec.tx.group_index;
    j["tx"] = tx;

    json link;
    link["n_modes"] = spec.link.n_modes_link;
    link["n_sections"] = spec.link.n_sections;
    link["target_mdl_db"] = spec.link.target_mdl_db;
    link["mode_groups"] = spec.link.mode_group_of_mode;
    link["inter_group_xt_db"] = spec.link.inter_group_xt_db;
    link["dmgd_ps_per_km"] = spec.link.dmgd_ps_per_km;
    link["cd_ps2_per_km"] = spec.link.cd_ps2_per_km;
    link["length_km"] = spec.link.length_km;
    link["span_loss_db"] = spec.link.span_loss_db;
    link["amp_noise_figure_db"] = spec.link.amp_noise_figure_db;
    link["ase_reference_db"] = spec.link.ase_reference_db;
    link["snr_ceiling_enabled"] = spec.link.snr_ceiling_enabled;
    link["snr_ceiling_db"] = spec.link.snr_ceiling_db;
    link["nl_ref_dbm"] = spec.link.nl_ref_dbm;
    link["mdl_grid_points"] = spec.link.mdl_grid_points;
    link["mdl_band_hz"] = spec.link.mdl_band_hz;
    j["link"] = link;

    json kk;
    kk["lo_offset_hz"] = spec.kk.lo_offset_hz;
    kk["cspr_db"] = spec.kk.cspr_db;
    kk["adc_rate_hz"] = spec.kk.adc_rate_hz;
    kk["analog_bandwidth_hz"] = spec.kk.analog_bandwidth_hz;
    kk["internal_oversampling"] = spec.kk.internal_oversampling;
    kk["output_lowpass_hz"] = spec.kk.output_lowpass_hz;
    kk["bias_search"] = spec.kk.bias_fixed ? "fixed" : "golden-section";
    kk["dc_bias"] = spec.kk.dc_bias;
    kk["bias_low_rel"] = spec.kk.bias_low_rel;
    kk["bias_high_rel"] = spec.kk.bias_high_rel;
    kk["bias_tol_rel"] = spec.kk.bias_tol_rel;
    kk["pilot_samples"] = spec.kk.pilot_samples;
    j["kk"] = kk;

    json eq;
    eq["n_taps"] = spec.eq.n_taps;
    eq["step_train"] = spec.eq.step_train;
    eq["step_dd"] = spec.eq.step_dd;
    eq["bps_test_phases"] = spec.eq.bps_test_phases;
    eq["bps_window"] = spec.eq.bps_window;
    eq["n_train_symbols"] = spec.eq.n_train_symbols;
    eq["train_passes"] = spec.eq.train_passes;
    j["eq"] = eq;

    j["fec"] = {{"code_rate", spec.fec.code_rate}, {"ngmi_threshold", spec.fec.ngmi_threshold}};
    j["sweep_dbm"] = spec.sweep_dbm;
    j["rx_subsets"] = spec.rx_subsets;
    j["n_captures"] = spec.n_captures;
    j["base_seed"] = spec.base_seed;
    j["freq_offset_hz"] = spec.freq_offset_hz;
    j["guard_symbols"] = spec.guard_symbols;
    j["output_dir"] = spec.output_dir;
    j["jobs"] = spec.jobs;
    j["dump_matrices"] = spec.dump_matrices;
    return j.dump(2) + "\n";
}

std::vector<std::string> preset_names() { return {"paper6", "paper3"}; }

ExperimentSpec preset_spec(const std::string& name) {
    ExperimentSpec spec; // defaults are the 6-mode scenario
    if (name == "paper6" || name.empty()) {
        spec.preset_name = "paper6";
        return spec;
    }
    if (name == "paper3") {
        spec.preset_name = "paper3";
        spec.tx.active_modes = {SpatialMode::LP01, SpatialMode::LP11a, SpatialMode::LP11b};
        spec.rx_subsets = {3, 4, 5, 6};
        return spec;
    }
    throw std::invalid_argument("unknown preset '" + name + "' (have: paper6, paper3)");
}

} // namespace mdmsim
