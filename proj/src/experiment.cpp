// SPDX-License-Identifier: Apache-2.0
#include "mdmsim/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "mdmsim/dsp_util.hpp"
#include "mdmsim/fir.hpp"
#include "mdmsim/kk_receiver.hpp"
#include "mdmsim/matrix_io.hpp"
#include "mdmsim/resample.hpp"
#include "mdmsim/rng.hpp"

namespace mdmsim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string fmt_power(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::uint64_t power_key(double power_dbm) {
    const long long milli = std::llround(power_dbm * 1000.0);
    return static_cast<std::uint64_t>(milli);
}

std::string sanitize_csv(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return s;
}

/// KK detection of every tributary: resample to the ADC grid, photodetect,
/// restore the bias (optimized or bookkept), reconstruct, reassemble.
ComplexFrame kk_front_end(const ComplexFrame& noisy, const ExperimentSpec& spec) {
    const auto [p_adc, q_adc] = rational_rate_ratio(noisy.sample_rate_hz, spec.kk.adc_rate_hz);
    const double fs_adc = noisy.sample_rate_hz * p_adc / q_adc;

    ComplexFrame out;
    out.sample_rate_hz = fs_adc;
    out.channels.resize(noisy.channel_count());

    for (std::size_t t = 0; t < noisy.channel_count(); ++t) {
        ComplexFrame trib(1, noisy.length(), noisy.sample_rate_hz);
        trib.channels[0] = noisy.channels[t];
        const ComplexFrame adc = resample(trib, p_adc, q_adc);

        double removed_dc = 0.0;
        const std::vector<double> i_ac = photodetect(adc, spec.kk, &removed_dc);
        double trough = 0.0;
        for (double v : i_ac) trough = std::min(trough, v);

        // The bookkept DC can sit below the deepest intensity trough at low
        // CSPR (minimum-phase violations); lift it just above so the
        // reconstruction stays defined. A user-set bias is taken literally.
        double bias = std::max(removed_dc, -trough * (1.0 + 1e-9));
        if (spec.kk.bias_fixed) {
            if (spec.kk.dc_bias > 0.0) bias = spec.kk.dc_bias;
        } else {
            // Pilot quality: closeness of the reconstructed slice to the field
            // that actually hit the photodiode (simulator-side reference).
            const std::size_t n = i_ac.size();
            const std::size_t pilot =
                std::min<std::size_t>(static_cast<std::size_t>(spec.kk.pilot_samples), n & ~std::size_t{1});
            const std::size_t start = (n - pilot) / 2;
            const std::size_t guard = std::min<std::size_t>(1024, pilot / 8);
            const std::vector<cplx> truth(adc.channels[0].begin() + static_cast<std::ptrdiff_t>(start + guard),
                                          adc.channels[0].begin() + static_cast<std::ptrdiff_t>(start + pilot - guard));
            const auto quality = [&](double, const ComplexFrame& pilot_rec) {
                const std::vector<cplx> rec(pilot_rec.channels[0].begin() + static_cast<std::ptrdiff_t>(guard),
                                            pilot_rec.channels[0].end() - static_cast<std::ptrdiff_t>(guard));
                return -evm_percent(rec, truth);
            };
            bias = optimize_dc_bias(i_ac, fs_adc, spec.kk, removed_dc, quality).bias;
        }

        out.channels[t] = kk_reconstruct(i_ac, fs_adc, spec.kk, bias).channels[0];
    }
    return out;
}

MetricsReport receiver_dsp(const ComplexFrame& kk_out, const TxReference& ref,
                           const ExperimentSpec& spec, int k_rx,
                           EqualizerState* taps_out = nullptr) {
    const Constellation& c = ref.constellation;
    const int n_tx_modes = static_cast<int>(spec.tx.active_modes.size());
    const int n_streams = 2 * n_tx_modes;

    RxSelection sel;
    sel.transmitted_modes = n_tx_modes;
    sel.received_modes = k_rx;
    const ComplexFrame picked = select_receivers(kk_out, sel);

    const auto [p2, q2] = rational_rate_ratio(picked.sample_rate_hz, 2.0 * ref.baud_hz);
    ComplexFrame two_sps = resample(picked, p2, q2);

    const FreqOffsetEstimate foe =
        estimate_frequency_offset(two_sps, ref.symbols, ref.rrc);
    frequency_shift(two_sps, -foe.offset_hz);

    RrcSpec rrc2 = ref.rrc;
    rrc2.samples_per_symbol = 2;
    const ComplexFrame filtered = fir_filter(two_sps, design_rrc(rrc2));

    const long long lag = align_to_reference(filtered, ref.symbols, 64);

    const std::size_t guard2 = 2 * static_cast<std::size_t>(spec.guard_symbols);
    if (filtered.length() <= 2 * guard2 + 64)
        throw std::runtime_error("receiver: frame shorter than the guard regions");
    ComplexFrame trimmed;
    trimmed.sample_rate_hz = filtered.sample_rate_hz;
    trimmed.channels.resize(filtered.channel_count());
    for (std::size_t ch = 0; ch < filtered.channel_count(); ++ch)
        trimmed.channels[ch].assign(filtered.channels[ch].begin() + static_cast<std::ptrdiff_t>(guard2),
                                    filtered.channels[ch].end() - static_cast<std::ptrdiff_t>(guard2));

    // Trimmed-frame symbol s lines up with reference symbol s + r0: the guard
    // shift plus the measured symbol lag of the un-trimmed frame.
    const long long n_sym = static_cast<long long>(ref.symbols.front().size());
    long long r0 = static_cast<long long>(spec.guard_symbols) - lag;
    r0 = ((r0 % n_sym) + n_sym) % n_sym;

    std::vector<std::vector<cplx>> refs_eq(static_cast<std::size_t>(n_streams));
    std::vector<std::vector<std::uint8_t>> bits_eq(static_cast<std::size_t>(n_streams));
    const int m = c.bits_per_symbol;
    for (int i = 0; i < n_streams; ++i) {
        const auto& sym = ref.symbols[static_cast<std::size_t>(i)];
        const auto& bits = ref.bits[static_cast<std::size_t>(i)];
        refs_eq[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(n_sym));
        bits_eq[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(n_sym) * m);
        for (long long s = 0; s < n_sym; ++s) {
            const std::size_t src = static_cast<std::size_t>((s + r0) % n_sym);
            refs_eq[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)] = sym[src];
            for (int b = 0; b < m; ++b)
                bits_eq[static_cast<std::size_t>(i)][static_cast<std::size_t>(s) * m + b] =
                    bits[src * static_cast<std::size_t>(m) + static_cast<std::size_t>(b)];
        }
    }

    const EqualizeResult eq = mimo_equalize(trimmed, refs_eq, c, spec.eq);

    MetricsReport rep;
    rep.baud_hz = spec.tx.baud_hz;
    rep.n_streams = n_streams;
    rep.bits_per_symbol = m;
    rep.fec = spec.fec;
    rep.freq_offset_hz = foe.offset_hz;
    rep.foe_confidence_db = foe.confidence_db;
    rep.gmi_per_stream.resize(static_cast<std::size_t>(n_streams));
    rep.evm_per_stream_pct.resize(static_cast<std::size_t>(n_streams));
    rep.snr_per_stream_db.resize(static_cast<std::size_t>(n_streams));

    for (int i = 0; i < n_streams; ++i) {
        const auto& out = eq.symbols[static_cast<std::size_t>(i)];
        const std::size_t n_out_sym = out.size();
        std::vector<cplx> ref_slice(n_out_sym);
        std::vector<std::uint8_t> bit_slice(n_out_sym * static_cast<std::size_t>(m));
        for (std::size_t s = 0; s < n_out_sym; ++s) {
            const std::size_t src = static_cast<std::size_t>(
                (static_cast<long long>(eq.first_symbol) + static_cast<long long>(s)) % n_sym);
            ref_slice[s] = refs_eq[static_cast<std::size_t>(i)][src];
            for (int b = 0; b < m; ++b)
                bit_slice[s * static_cast<std::size_t>(m) + static_cast<std::size_t>(b)] =
                    bits_eq[static_cast<std::size_t>(i)][src * static_cast<std::size_t>(m) + static_cast<std::size_t>(b)];
        }
        rep.gmi_per_stream[static_cast<std::size_t>(i)] = compute_gmi(out, bit_slice, c);
        rep.evm_per_stream_pct[static_cast<std::size_t>(i)] = evm_percent(out, ref_slice);
        rep.snr_per_stream_db[static_cast<std::size_t>(i)] = estimate_snr_db(out, ref_slice);
    }

    rep.mode_names.clear();
    rep.gmi_per_mode.resize(static_cast<std::size_t>(n_tx_modes));
    for (int mo = 0; mo < n_tx_modes; ++mo) {
        rep.mode_names.push_back(mode_name(spec.tx.active_modes[static_cast<std::size_t>(mo)]));
        rep.gmi_per_mode[static_cast<std::size_t>(mo)] =
            0.5 * (rep.gmi_per_stream[static_cast<std::size_t>(2 * mo)] +
                   rep.gmi_per_stream[static_cast<std::size_t>(2 * mo + 1)]);
    }

    const RateReport rr = net_rate(rep.gmi_per_mode, rep.baud_hz, rep.fec, n_streams, m);
    rep.ngmi = rr.ngmi;
    rep.line_rate_gbps = rr.line_rate_gbps;
    rep.net_rate_gbps = rr.net_rate_gbps;
    rep.below_fec = rr.below_threshold;

    rep.mdl_db = mdl_from_taps(eq.state);

    std::vector<int> tx_groups, rx_groups;
    for (int mo = 0; mo < n_tx_modes; ++mo)
        tx_groups.push_back(mode_group(spec.tx.active_modes[static_cast<std::size_t>(mo)]));
    for (int mo = 0; mo < k_rx; ++mo)
        rx_groups.push_back(spec.link.mode_group_of_mode[static_cast<std::size_t>(mo)]);
    const CrosstalkMatrices xt = crosstalk_matrices(eq.state, tx_groups, rx_groups);
    rep.xt_spatial_db = xt.spatial_db;
    rep.xt_group_db = xt.group_db;
    if (taps_out) *taps_out = eq.state;
    return rep;
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& row_labels,
                      const std::vector<std::string>& col_labels) {
    std::ofstream out(path);
    out << "rx\\tx";
    for (const auto& c : col_labels) out << "," << c;
    out << "\n";
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        out << (r < static_cast<Eigen::Index>(row_labels.size()) ? row_labels[static_cast<std::size_t>(r)]
                                                                 : std::to_string(r));
        for (Eigen::Index c = 0; c < m.cols(); ++c) out << "," << fmt_g(m(r, c));
        out << "\n";
    }
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

} // namespace

std::string report_to_json(const MetricsReport& rep) {
    json j;
    j["mode_names"] = rep.mode_names;
    j["gmi_per_mode"] = rep.gmi_per_mode;
    j["gmi_per_stream"] = rep.gmi_per_stream;
    j["evm_per_stream_pct"] = rep.evm_per_stream_pct;
    j["snr_per_stream_db"] = rep.snr_per_stream_db;
    j["ngmi"] = rep.ngmi;
    j["line_rate_gbps"] = rep.line_rate_gbps;
    j["net_rate_gbps"] = rep.net_rate_gbps;
    j["below_fec"] = rep.below_fec;
    j["mdl_db"] = rep.mdl_db;
    j["xt_spatial_db"] = matrix_to_json(rep.xt_spatial_db);
    j["xt_group_db"] = matrix_to_json(rep.xt_group_db);
    j["freq_offset_hz"] = rep.freq_offset_hz;
    j["foe_confidence_db"] = rep.foe_confidence_db;
    j["baud_hz"] = rep.baud_hz;
    j["n_streams"] = rep.n_streams;
    j["bits_per_symbol"] = rep.bits_per_symbol;
    j["fec"] = {{"code_rate", rep.fec.code_rate}, {"ngmi_threshold", rep.fec.ngmi_threshold}};
    j["n_captures"] = rep.n_captures;
    return j.dump(2) + "\n";
}

MetricsReport run_receiver_chain(const ComplexFrame& noisy, const TxReference& ref,
                                 const ExperimentSpec& spec, int k_rx) {
    return receiver_dsp(kk_front_end(noisy, spec), ref, spec, k_rx);
}

ResultSet run_experiment(const ExperimentSpec& spec) {
    {
        const auto issues = validate_spec(spec);
        if (!issues.empty()) {
            std::string msg = "invalid experiment spec:";
            for (const auto& i : issues) msg += "\n  " + to_string(i);
            throw std::invalid_argument(msg);
        }
    }

    ResultSet rs;
    rs.spec = spec;
    rs.output_dir = spec.output_dir;
    fs::create_directories(fs::path(spec.output_dir) / "reports");

    // One transmit frame and one channel realization serve the whole sweep:
    // captures differ in noise, launch powers in the noise level only.
    TxConfig txc = spec.tx;
    txc.seed = mix_seed({spec.base_seed, 0x7adaull});
    LinkConfig linkc = spec.link;
    linkc.seed = mix_seed({spec.base_seed, 0x11f4ull});

    auto [tx_frame, ref] = assemble_spatial_frame(txc);
    const ChannelRealization channel = synthesize_channel(linkc);
    const int pad_modes = linkc.n_modes_link - static_cast<int>(txc.active_modes.size());
    const ComplexFrame rx_clean = apply_channel(tx_frame, channel, pad_modes);

    if (spec.dump_matrices)
        save_channel(channel, (fs::path(spec.output_dir) / "channel_realization.txt").string());

    struct Task {
        double power;
        int capture;
    };
    std::vector<Task> tasks;
    std::vector<double> powers = spec.sweep_dbm;
    std::sort(powers.begin(), powers.end());
    for (double p : powers)
        for (int cap = 0; cap < spec.n_captures; ++cap) tasks.push_back({p, cap});

    std::vector<std::vector<PointResult>> slots(tasks.size());
    std::atomic<std::size_t> next{0};

    const auto worker = [&]() {
        while (true) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= tasks.size()) return;
            const Task& t = tasks[idx];
            std::vector<PointResult>& out = slots[idx];

            ComplexFrame kk12;
            bool front_ok = true;
            std::string front_err;
            try {
                ComplexFrame noisy = add_noise(
                    rx_clean, t.power, linkc,
                    mix_seed({spec.base_seed, 0x4015eull, power_key(t.power),
                              static_cast<std::uint64_t>(t.capture)}));
                if (spec.freq_offset_hz != 0.0) frequency_shift(noisy, spec.freq_offset_hz);
                kk12 = kk_front_end(noisy, spec);
            } catch (const std::exception& e) {
                front_ok = false;
                front_err = e.what();
            }

            for (int k : spec.rx_subsets) {
                PointResult pr;
                pr.power_dbm = t.power;
                pr.k_rx = k;
                pr.capture = t.capture;
                if (!front_ok) {
                    pr.ok = false;
                    pr.error = front_err;
                } else {
                    try {
                        EqualizerState taps;
                        pr.report = receiver_dsp(kk12, ref, spec, k,
                                                 spec.dump_matrices && t.capture == 0 ? &taps
                                                                                      : nullptr);
                        pr.ok = true;
                        if (spec.dump_matrices && t.capture == 0) {
                            const std::string name = "taps_p" + fmt_power(t.power) + "_k" +
                                                     std::to_string(k) + ".txt";
                            save_taps(taps, (fs::path(spec.output_dir) / name).string());
                        }
                    } catch (const std::exception& e) {
                        pr.ok = false;
                        pr.error = e.what();
                    }
                }
                out.push_back(std::move(pr));
            }
        }
    };

    const int n_workers = std::max(1, std::min<int>(spec.jobs, static_cast<int>(tasks.size())));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    for (auto& slot : slots)
        for (auto& pr : slot) rs.captures.push_back(std::move(pr));

    for (const auto& pr : rs.captures)
        if (!pr.ok)
            rs.failures.push_back("power " + fmt_power(pr.power_dbm) + " dBm, k=" +
                                  std::to_string(pr.k_rx) + ", capture " +
                                  std::to_string(pr.capture) + ": " + pr.error);

    // Capture averages per (power, k).
    for (double p : powers) {
        for (int k : spec.rx_subsets) {
            std::vector<MetricsReport> oks;
            for (const auto& pr : rs.captures)
                if (pr.power_dbm == p && pr.k_rx == k && pr.ok) oks.push_back(pr.report);
            PointResult avg;
            avg.power_dbm = p;
            avg.k_rx = k;
            avg.capture = -1;
            if (oks.empty()) {
                avg.ok = false;
                avg.error = "no successful captures";
            } else {
                avg.ok = true;
                avg.report = average_captures(oks);
            }
            rs.averaged.push_back(std::move(avg));
        }
    }

    // Persist: resolved config, tidy results, per-point reports.
    {
        std::ofstream cfg(fs::path(spec.output_dir) / "config.json");
        cfg << spec_to_json(spec);
    }
    {
        std::ofstream csv(fs::path(spec.output_dir) / "results.csv");
        csv << "power_dbm,k_rx,capture,mode,gmi_bits,evm_pct,snr_db,ngmi,line_rate_gbps,"
               "net_rate_gbps,below_fec,mdl_db,freq_offset_hz_est,foe_confidence_db,seed,status,"
               "error\n";
        const auto write_point = [&](const PointResult& pr) {
            const std::string cap = pr.capture < 0 ? "avg" : std::to_string(pr.capture);
            if (!pr.ok) {
                csv << fmt_power(pr.power_dbm) << "," << pr.k_rx << "," << cap
                    << ",all,,,,,,,,,,," << spec.base_seed << ",failed," << sanitize_csv(pr.error)
                    << "\n";
                return;
            }
            const MetricsReport& r = pr.report;
            for (std::size_t mo = 0; mo < r.gmi_per_mode.size(); ++mo) {
                csv << fmt_power(pr.power_dbm) << "," << pr.k_rx << "," << cap << ","
                    << r.mode_names[mo] << "," << fmt_g(r.gmi_per_mode[mo]) << ","
                    << fmt_g(0.5 * (r.evm_per_stream_pct[2 * mo] + r.evm_per_stream_pct[2 * mo + 1]))
                    << ","
                    << fmt_g(0.5 * (r.snr_per_stream_db[2 * mo] + r.snr_per_stream_db[2 * mo + 1]))
                    << "," << fmt_g(r.ngmi) << "," << fmt_g(r.line_rate_gbps) << ","
                    << fmt_g(r.net_rate_gbps) << "," << (r.below_fec ? 1 : 0) << ","
                    << fmt_g(r.mdl_db) << "," << fmt_g(r.freq_offset_hz) << ","
                    << fmt_g(r.foe_confidence_db) << "," << spec.base_seed << ",ok,\n";
            }
            double mean_gmi = 0.0, mean_evm = 0.0, mean_snr = 0.0;
            for (double g : r.gmi_per_mode) mean_gmi += g;
            mean_gmi /= static_cast<double>(r.gmi_per_mode.size());
            for (double e : r.evm_per_stream_pct) mean_evm += e;
            mean_evm /= static_cast<double>(r.evm_per_stream_pct.size());
            for (double s : r.snr_per_stream_db) mean_snr += s;
            mean_snr /= static_cast<double>(r.snr_per_stream_db.size());
            csv << fmt_power(pr.power_dbm) << "," << pr.k_rx << "," << cap << ",all,"
                << fmt_g(mean_gmi) << "," << fmt_g(mean_evm) << "," << fmt_g(mean_snr) << ","
                << fmt_g(r.ngmi) << "," << fmt_g(r.line_rate_gbps) << ","
                << fmt_g(r.net_rate_gbps) << "," << (r.below_fec ? 1 : 0) << "," << fmt_g(r.mdl_db)
                << "," << fmt_g(r.freq_offset_hz) << "," << fmt_g(r.foe_confidence_db) << ","
                << spec.base_seed << ",ok,\n";
        };
        for (const auto& pr : rs.captures) write_point(pr);
        for (const auto& pr : rs.averaged) write_point(pr);
    }
    for (const auto& pr : rs.averaged) {
        if (!pr.ok) continue;
        const std::string name =
            "report_p" + fmt_power(pr.power_dbm) + "_k" + std::to_string(pr.k_rx) + ".json";
        std::ofstream out(fs::path(spec.output_dir) / "reports" / name);
        out << report_to_json(pr.report);
    }
    {
        std::ofstream sum(fs::path(spec.output_dir) / "summary.txt");
        sum << "points: " << rs.captures.size() << "\n";
        sum << "failures: " << rs.failures.size() << "\n";
        for (const auto& f : rs.failures) sum << "  " << f << "\n";
    }
    return rs;
}

std::vector<std::string> export_plotdata(const std::string& results_dir, const std::string& figure,
                                         const std::string& out_dir_in) {
    const std::string out_dir = out_dir_in.empty() ? results_dir : out_dir_in;
    fs::create_directories(out_dir);

    const fs::path csv_path = fs::path(results_dir) / "results.csv";
    std::ifstream in(csv_path);
    if (!in) throw std::invalid_argument("export: no results.csv under " + results_dir);

    struct Row {
        std::vector<std::string> f;
    };
    std::vector<Row> rows;
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        Row r;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) r.f.push_back(cell);
        while (r.f.size() < 17) r.f.emplace_back();
        rows.push_back(std::move(r));
    }

    std::vector<std::string> written;
    const auto tidy = [&](const char* fname, const char* metric, int col) {
        const fs::path p = fs::path(out_dir) / fname;
        std::ofstream out(p);
        out << "power_dbm,mode,k_rx,capture,metric,value\n";
        for (const auto& r : rows) {
            if (r.f[15] != "ok") continue;
            if (std::string(metric) == "mdl_db" && r.f[3] != "all") continue;
            out << r.f[0] << "," << r.f[3] << "," << r.f[1] << "," << r.f[2] << "," << metric
                << "," << r.f[static_cast<std::size_t>(col)] << "\n";
        }
        written.push_back(p.string());
    };

    if (figure == "gmi_vs_power") {
        tidy("fig_gmi_vs_power.csv", "gmi", 4);
    } else if (figure == "mdl_vs_power") {
        tidy("fig_mdl_vs_power.csv", "mdl_db", 11);
    } else if (figure == "xt_matrix") {
        const fs::path rep_dir = fs::path(results_dir) / "reports";
        if (!fs::exists(rep_dir)) throw std::invalid_argument("export: no reports directory");
        std::vector<fs::path> reports;
        for (const auto& e : fs::directory_iterator(rep_dir))
            if (e.path().extension() == ".json") reports.push_back(e.path());
        std::sort(reports.begin(), reports.end());
        for (const auto& rp : reports) {
            std::ifstream rin(rp);
            json j = json::parse(rin);
            const auto mat_of = [&](const char* key) {
                const json& rows_j = j.at(key);
                Eigen::MatrixXd m(rows_j.size(), rows_j.empty() ? 0 : rows_j.front().size());
                for (std::size_t r = 0; r < rows_j.size(); ++r)
                    for (std::size_t c = 0; c < rows_j[r].size(); ++c)
                        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                            rows_j[r][c].get<double>();
                return m;
            };
            std::vector<std::string> tx_labels = j.at("mode_names").get<std::vector<std::string>>();
            const Eigen::MatrixXd spatial = mat_of("xt_spatial_db");
            const Eigen::MatrixXd group = mat_of("xt_group_db");
            std::vector<std::string> rx_labels;
            for (Eigen::Index r = 0; r < spatial.rows(); ++r)
                rx_labels.push_back(mode_name(kModeOrder[static_cast<std::size_t>(r)]));
            std::vector<std::string> tx_group_labels, rx_group_labels;
            for (Eigen::Index c = 0; c < group.cols(); ++c)
                tx_group_labels.push_back("g" + std::to_string(c + 1));
            for (Eigen::Index r = 0; r < group.rows(); ++r)
                rx_group_labels.push_back("g" + std::to_string(r + 1));

            const std::string stem = rp.stem().string().substr(std::string("report_").size());
            const fs::path sp = fs::path(out_dir) / ("fig_xt_spatial_" + stem + ".csv");
            const fs::path gp = fs::path(out_dir) / ("fig_xt_group_" + stem + ".csv");
            write_matrix_csv(sp.string(), spatial, rx_labels, tx_labels);
            write_matrix_csv(gp.string(), group, rx_group_labels, tx_group_labels);
            written.push_back(sp.string());
            written.push_back(gp.string());
        }
    } else {
        throw std::invalid_argument("export: unknown figure '" + figure +
                                    "' (have: gmi_vs_power, mdl_vs_power, xt_matrix)");
    }
    return written;
}

} // namespace mdmsim
