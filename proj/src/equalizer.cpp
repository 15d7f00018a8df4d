// SPDX-License-Identifier: Apache-2.0
#include "mdmsim/equalizer.hpp"

#include <algorithm>
#include <cmath>

#include "mdmsim/fft.hpp"
#include "mdmsim/fir.hpp"
#include "mdmsim/matrix_io.hpp"

namespace mdmsim {

void EqualizerConfig::validate() const {
    if (n_taps < 1 || n_taps % 2 == 0)
        throw std::invalid_argument("equalizer: n_taps must be odd and >= 1");
    if (!(step_train > 0.0) || !(step_dd > 0.0))
        throw std::invalid_argument("equalizer: steps must be > 0");
    if (bps_test_phases < 4) throw std::invalid_argument("equalizer: bps_test_phases must be >= 4");
    if (bps_window < 1) throw std::invalid_argument("equalizer: bps_window must be >= 1");
    if (n_train_symbols < 0) throw std::invalid_argument("equalizer: n_train_symbols must be >= 0");
    if (train_passes < 1) throw std::invalid_argument("equalizer: train_passes must be >= 1");
    if (!(trace_target > 0.0)) throw std::invalid_argument("equalizer: trace_target must be > 0");
}

void RxSelection::validate(int available_modes) const {
    if (received_modes < 1) throw std::invalid_argument("rx_selection: received_modes must be >= 1");
    if (received_modes > available_modes)
        throw std::invalid_argument("rx_selection: received_modes exceeds available modes");
    if (transmitted_modes < 1)
        throw std::invalid_argument("rx_selection: transmitted_modes must be >= 1");
}

ComplexFrame select_receivers(const ComplexFrame& rx, const RxSelection& sel) {
    rx.validate();
    if (rx.channel_count() % 2 != 0)
        throw std::invalid_argument("select_receivers: expects polarization pairs");
    sel.validate(static_cast<int>(rx.channel_count()) / 2);

    ComplexFrame out;
    out.sample_rate_hz = rx.sample_rate_hz;
    out.center_offset_hz = rx.center_offset_hz;
    out.channels.assign(rx.channels.begin(),
                        rx.channels.begin() + 2 * static_cast<std::ptrdiff_t>(sel.received_modes));
    return out;
}

namespace {

std::vector<cplx> reference_waveform_2sps(const std::vector<cplx>& symbols, const RrcSpec& shaping) {
    RrcSpec s2 = shaping;
    s2.samples_per_symbol = 2;
    std::vector<cplx> wave(symbols.size() * 2, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < symbols.size(); ++i) wave[2 * i] = symbols[i];
    return fir_filter_channel(wave, design_rrc(s2));
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Circular cross-correlation c[k] = sum_n a[n] * conj(b[n-k]) on a common
// padded grid; index negative lags from the back.
std::vector<cplx> xcorr_fft(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    const std::size_t m = next_pow2(a.size() + b.size());
    std::vector<cplx> fa(m, 0.0), fb(m, 0.0);
    std::copy(a.begin(), a.end(), fa.begin());
    std::copy(b.begin(), b.end(), fb.begin());
    fft_inplace(fa, false);
    fft_inplace(fb, false);
    for (std::size_t i = 0; i < m; ++i) fa[i] *= std::conj(fb[i]);
    fft_inplace(fa, true);
    return fa;
}

struct EngineOptions {
    bool adapt = true;
    const EqualizerState* init = nullptr;
};

EqualizeResult equalizer_engine(const ComplexFrame& rx, const std::vector<std::vector<cplx>>& refs,
                                const Constellation& c, const EqualizerConfig& cfg,
                                const EngineOptions& opt) {
    cfg.validate();
    rx.validate();
    c.validate();
    if (refs.empty()) throw std::invalid_argument("equalizer: no reference streams");
    const std::size_t n_ref = refs.front().size();
    for (const auto& r : refs)
        if (r.size() != n_ref || r.empty())
            throw std::invalid_argument("equalizer: ragged reference streams");

    const int n_in = static_cast<int>(rx.channel_count());
    const int n_out = static_cast<int>(refs.size());
    const int L = cfg.n_taps;
    const int center = (L - 1) / 2;
    const std::ptrdiff_t n_samp = static_cast<std::ptrdiff_t>(rx.length());
    if (n_samp < 4 * L) throw std::invalid_argument("equalizer: frame too short for the tap span");

    const int s_min = (center + 1) / 2;
    const int s_max = static_cast<int>((n_samp - L + center) / 2);
    const int n_avail = s_max - s_min + 1;
    if (n_avail < 32) throw std::invalid_argument("equalizer: too few symbols");
    const int n_train = std::min(cfg.n_train_symbols, n_avail);

    // Normalized input copy; the target correlation trace keeps the pinned
    // step sizes in their stable range for any (n_in, L).
    const double p_in = rx.mean_channel_power();
    const double p_target = cfg.trace_target / (static_cast<double>(n_in) * L);
    const double in_scale = std::sqrt(p_target / std::max(p_in, 1e-300));
    std::vector<std::vector<cplx>> x(static_cast<std::size_t>(n_in));
    for (int j = 0; j < n_in; ++j) {
        x[static_cast<std::size_t>(j)].resize(static_cast<std::size_t>(n_samp));
        const auto& src = rx.channels[static_cast<std::size_t>(j)];
        for (std::ptrdiff_t n = 0; n < n_samp; ++n)
            x[static_cast<std::size_t>(j)][static_cast<std::size_t>(n)] = src[static_cast<std::size_t>(n)] * in_scale;
    }

    EqualizerState st(n_out, n_in, L);
    if (opt.init) {
        if (opt.init->n_out != n_out || opt.init->n_in != n_in || opt.init->n_taps != L)
            throw std::invalid_argument("equalizer: initial state dimensions mismatch");
        st = *opt.init;
    } else {
        // Center-tap start with the gain matched to the symbol-instant sample
        // power: a large initial gain error would be corrected at the LMS
        // per-frequency rate and leave slowly-decaying residue in the weakly
        // excited roll-off edges.
        for (int i = 0; i < std::min(n_out, n_in); ++i) {
            double p_sym = 0.0;
            const int probe = std::min(2048, n_avail);
            for (int s = s_min; s < s_min + probe; ++s)
                p_sym += std::norm(x[static_cast<std::size_t>(i)][static_cast<std::size_t>(2 * s)]);
            p_sym /= static_cast<double>(probe);
            st.tap(i, i, center) = 1.0 / std::sqrt(std::max(p_sym, 1e-300));
        }
    }

    const int n_phases = cfg.bps_test_phases;
    std::vector<cplx> derot(static_cast<std::size_t>(n_phases));
    std::vector<double> cand_phase(static_cast<std::size_t>(n_phases));
    for (int b = 0; b < n_phases; ++b) {
        cand_phase[static_cast<std::size_t>(b)] =
            -M_PI / 4.0 + (b + 0.5) * (M_PI / 2.0) / n_phases;
        derot[static_cast<std::size_t>(b)] = std::polar(1.0, -cand_phase[static_cast<std::size_t>(b)]);
    }

    const int W = cfg.bps_window;
    std::vector<double> ring(static_cast<std::size_t>(n_out) * n_phases * W, 0.0);
    std::vector<double> ring_sum(static_cast<std::size_t>(n_out) * n_phases, 0.0);
    std::vector<double> prev_phase(static_cast<std::size_t>(n_out), 0.0);

    const double in_power_per_symbol = 2.0 * n_in * p_target;
    const double divergence_level = cfg.divergence_power_ratio * in_power_per_symbol;
    double out_power_ema = 0.0;
    int over_count = 0;

    EqualizeResult res;
    res.symbols.resize(static_cast<std::size_t>(n_out));
    res.phase_track.resize(static_cast<std::size_t>(n_out));
    res.first_symbol = std::min(s_min + n_train, s_max + 1);
    const int n_emit = s_max + 1 - res.first_symbol;
    for (auto& v : res.symbols) v.reserve(static_cast<std::size_t>(std::max(0, n_emit)));

    std::vector<cplx> y(static_cast<std::size_t>(n_out));
    double err_window_acc = 0.0;
    int err_window_n = 0;
    constexpr int kErrWindow = 1000;

    for (int pass = 0; pass < cfg.train_passes; ++pass) {
        const bool final_pass = (pass == cfg.train_passes - 1);
        const int s_end = final_pass ? s_max : std::min(s_min + n_train - 1, s_max);
        std::fill(ring.begin(), ring.end(), 0.0);
        std::fill(ring_sum.begin(), ring_sum.end(), 0.0);
        std::fill(prev_phase.begin(), prev_phase.end(), 0.0);
        int ring_pos = 0;

        for (int s = s_min; s <= s_end; ++s) {
            const bool training = (s - s_min) < n_train || !final_pass;
            const double mu = training ? cfg.step_train : cfg.step_dd;
            const std::ptrdiff_t base = 2 * static_cast<std::ptrdiff_t>(s) - center;

            double out_power = 0.0;
            for (int i = 0; i < n_out; ++i) {
                cplx acc = 0.0;
                const cplx* w = &st.taps[(static_cast<std::size_t>(i) * n_in) * L];
                for (int j = 0; j < n_in; ++j) {
                    const cplx* xs = &x[static_cast<std::size_t>(j)][static_cast<std::size_t>(base)];
                    cplx a = 0.0;
                    for (int l = 0; l < L; ++l) a += w[l] * xs[l];
                    acc += a;
                    w += L;
                }
                y[static_cast<std::size_t>(i)] = acc;
                out_power += std::norm(acc);
            }

            out_power_ema += (out_power - out_power_ema) / 64.0;
            if (out_power_ema > divergence_level || !std::isfinite(out_power_ema)) {
                if (++over_count >= cfg.divergence_symbols)
                    throw EqualizerDivergence(
                        "equalizer diverged: output power " + std::to_string(out_power_ema) +
                            " sustained above " + std::to_string(divergence_level),
                        st);
            } else {
                over_count = 0;
            }

            const std::size_t ref_i = static_cast<std::size_t>(s) % n_ref;
            for (int i = 0; i < n_out; ++i) {
                const cplx yi = y[static_cast<std::size_t>(i)];
                double* sums = &ring_sum[static_cast<std::size_t>(i) * n_phases];
                double* rbase = &ring[(static_cast<std::size_t>(i) * n_phases) * W];

                // Windowed metric per candidate phase; training scores against
                // the reference, decision mode against the nearest point.
                int best_b = 0;
                double best_sum = 0.0;
                const cplx ref_sym = refs[static_cast<std::size_t>(i)][ref_i];
                for (int b = 0; b < n_phases; ++b) {
                    const cplx z = yi * derot[static_cast<std::size_t>(b)];
                    double dist;
                    if (training) {
                        dist = std::norm(z - ref_sym);
                    } else {
                        dist = std::norm(z - c.points[0]);
                        for (std::size_t pt = 1; pt < c.points.size(); ++pt)
                            dist = std::min(dist, std::norm(z - c.points[pt]));
                    }
                    double* slot = rbase + static_cast<std::size_t>(b) * W + ring_pos;
                    sums[b] += dist - *slot;
                    *slot = dist;
                    if (b == 0 || sums[b] < best_sum) {
                        best_sum = sums[b];
                        best_b = b;
                    }
                }

                // Parabolic refinement between the neighboring candidates
                // takes out the test-phase quantization; the grid wraps across
                // the quarter-plane (the metric is pi/2-periodic in decision
                // mode and continuous enough in training).
                const double step = (M_PI / 2.0) / n_phases;
                const int b_lo = (best_b + n_phases - 1) % n_phases;
                const int b_hi = (best_b + 1) % n_phases;
                const double m_lo = sums[b_lo], m_mid = sums[best_b], m_hi = sums[b_hi];
                double frac = 0.0;
                const double curve = m_lo - 2.0 * m_mid + m_hi;
                if (curve > 1e-30) frac = std::clamp(0.5 * (m_lo - m_hi) / curve, -0.5, 0.5);
                const double raw = cand_phase[static_cast<std::size_t>(best_b)] + frac * step;

                // Unwrap across the pi/2 symmetry so slow drift keeps tracking.
                const double theta =
                    raw + (M_PI / 2.0) *
                              std::round((prev_phase[static_cast<std::size_t>(i)] - raw) / (M_PI / 2.0));
                prev_phase[static_cast<std::size_t>(i)] = theta;

                const cplx rot = std::polar(1.0, -theta);
                const cplx z = yi * rot;
                const cplx d = training ? ref_sym : hard_decision(c, z);
                const cplx err = (d - z) * std::conj(rot);

                if (final_pass && !training) {
                    res.symbols[static_cast<std::size_t>(i)].push_back(z);
                    res.phase_track[static_cast<std::size_t>(i)].push_back(theta);
                }
                if (pass == 0 && training && i == 0) {
                    err_window_acc += std::norm(d - z);
                    if (++err_window_n == kErrWindow) {
                        res.error_history.push_back(err_window_acc / kErrWindow);
                        err_window_acc = 0.0;
                        err_window_n = 0;
                    }
                }

                if (opt.adapt) {
                    const cplx g = mu * err;
                    cplx* w = &st.taps[(static_cast<std::size_t>(i) * n_in) * L];
                    for (int j = 0; j < n_in; ++j) {
                        const cplx* xs = &x[static_cast<std::size_t>(j)][static_cast<std::size_t>(base)];
                        for (int l = 0; l < L; ++l) w[l] += g * std::conj(xs[l]);
                        w += L;
                    }
                }
            }
            ring_pos = (ring_pos + 1) % W;
        }
    }

    res.state = std::move(st);
    return res;
}

} // namespace

EqualizeResult mimo_equalize(const ComplexFrame& rx_2sps, const std::vector<std::vector<cplx>>& refs,
                             const Constellation& c, const EqualizerConfig& cfg) {
    EngineOptions opt;
    opt.adapt = true;
    return equalizer_engine(rx_2sps, refs, c, cfg, opt);
}

EqualizeResult apply_taps(const ComplexFrame& rx_2sps, const EqualizerState& state,
                          const std::vector<std::vector<cplx>>& refs, const Constellation& c,
                          const EqualizerConfig& cfg) {
    EngineOptions opt;
    opt.adapt = false;
    opt.init = &state;
    return equalizer_engine(rx_2sps, refs, c, cfg, opt);
}

FreqOffsetEstimate estimate_frequency_offset(const ComplexFrame& rx_2sps,
                                             const std::vector<std::vector<cplx>>& ref_symbols,
                                             const RrcSpec& shaping, double search_hz) {
    rx_2sps.validate();
    if (ref_symbols.empty()) throw std::invalid_argument("freq_offset: no references");
    const double fs = rx_2sps.sample_rate_hz;
    const std::size_t n_pairs =
        std::min<std::size_t>(4, std::min(rx_2sps.channel_count(), ref_symbols.size()));

    std::vector<double> acc;
    for (std::size_t pidx = 0; pidx < n_pairs; ++pidx) {
        const std::vector<cplx> refw = reference_waveform_2sps(ref_symbols[pidx], shaping);
        const std::vector<cplx>& rxc = rx_2sps.channels[pidx];

        // Envelope correlation for the coarse lag: magnitude sequences are
        // immune to the very offset being estimated.
        const auto envelope = [](const std::vector<cplx>& v) {
            std::vector<cplx> e(v.size());
            double mean = 0.0;
            for (const cplx& x : v) mean += std::abs(x);
            mean /= static_cast<double>(v.size());
            for (std::size_t i = 0; i < v.size(); ++i) e[i] = std::abs(v[i]) - mean;
            return e;
        };
        const std::vector<cplx> corr = xcorr_fft(envelope(rxc), envelope(refw));
        long long best_lag = 0;
        double best_mag = -1.0;
        const long long m = static_cast<long long>(corr.size());
        for (long long lag = -8192; lag <= 8192; ++lag) {
            const double v = std::norm(corr[static_cast<std::size_t>(((lag % m) + m) % m)]);
            if (v > best_mag) {
                best_mag = v;
                best_lag = lag;
            }
        }

        // rx[n] ~ H(ref shifted by best_lag)[n] * exp(j*2*pi*df*n/fs); the
        // product spectrum carries the offset line.
        std::vector<cplx> prod;
        prod.reserve(rxc.size());
        for (std::size_t n = 0; n < rxc.size(); ++n) {
            const long long rn = static_cast<long long>(n) - best_lag;
            if (rn < 0 || rn >= static_cast<long long>(refw.size())) continue;
            prod.push_back(rxc[n] * std::conj(refw[static_cast<std::size_t>(rn)]));
        }
        if (prod.size() < 1024) continue;
        prod.resize(next_pow2(prod.size()), cplx(0.0, 0.0));
        fft_inplace(prod, false);
        if (acc.empty()) acc.assign(prod.size(), 0.0);
        if (acc.size() == prod.size())
            for (std::size_t k = 0; k < prod.size(); ++k) acc[k] += std::norm(prod[k]);
    }
    if (acc.empty()) throw std::invalid_argument("freq_offset: overlap too short");

    const std::size_t m = acc.size();
    std::size_t best_k = 0;
    double best_v = -1.0;
    std::vector<double> in_window;
    for (std::size_t k = 0; k < m; ++k) {
        const double f = bin_frequency(k, m, fs);
        if (std::abs(f) > search_hz) continue;
        in_window.push_back(acc[k]);
        if (acc[k] > best_v) {
            best_v = acc[k];
            best_k = k;
        }
    }
    std::nth_element(in_window.begin(), in_window.begin() + static_cast<std::ptrdiff_t>(in_window.size() / 2),
                     in_window.end());
    const double floor_v = std::max(in_window[in_window.size() / 2], 1e-300);

    // Parabolic refinement on the log-power of the three bins around the peak.
    const double l0 = std::log(std::max(acc[(best_k + m - 1) % m], 1e-300));
    const double l1 = std::log(std::max(acc[best_k], 1e-300));
    const double l2 = std::log(std::max(acc[(best_k + 1) % m], 1e-300));
    double delta = 0.0;
    const double den = l0 - 2.0 * l1 + l2;
    if (std::abs(den) > 1e-12) delta = std::clamp(0.5 * (l0 - l2) / den, -0.5, 0.5);

    FreqOffsetEstimate est;
    est.offset_hz = bin_frequency(best_k, m, fs) + delta * fs / static_cast<double>(m);
    est.confidence_db = 10.0 * std::log10(best_v / floor_v);
    est.low_confidence = est.confidence_db < 6.0;
    return est;
}

void save_taps(const EqualizerState& state, const std::string& path) {
    MatrixSetWriter w(path, "equalizer-taps");
    w.scalar("n_out", state.n_out);
    w.scalar("n_in", state.n_in);
    w.scalar("n_taps", state.n_taps);
    for (int o = 0; o < state.n_out; ++o) {
        Eigen::MatrixXcd m(state.n_in, state.n_taps);
        for (int i = 0; i < state.n_in; ++i)
            for (int l = 0; l < state.n_taps; ++l) m(i, l) = state.tap(o, i, l);
        w.matrix("out_" + std::to_string(o), m);
    }
    w.finish();
}

EqualizerState load_taps(const std::string& path) {
    MatrixSetReader r(path, "equalizer-taps");
    EqualizerState st(static_cast<int>(r.scalar("n_out")), static_cast<int>(r.scalar("n_in")),
                      static_cast<int>(r.scalar("n_taps")));
    for (int o = 0; o < st.n_out; ++o) {
        const Eigen::MatrixXcd m = r.matrix("out_" + std::to_string(o));
        for (int i = 0; i < st.n_in; ++i)
            for (int l = 0; l < st.n_taps; ++l) st.tap(o, i, l) = m(i, l);
    }
    return st;
}

long long align_to_reference(const ComplexFrame& rx_2sps,
                             const std::vector<std::vector<cplx>>& ref_symbols,
                             long long max_lag_symbols) {
    rx_2sps.validate();
    if (ref_symbols.empty()) throw std::invalid_argument("align: no references");
    // All stream pairs weigh in, so per-group delay spreads pull the global
    // lag to their power-weighted center.
    const std::size_t n_pairs = std::min(rx_2sps.channel_count(), ref_symbols.size());

    std::vector<double> score;
    std::size_t m = 0;
    for (std::size_t pidx = 0; pidx < n_pairs; ++pidx) {
        std::vector<cplx> sym(rx_2sps.length() / 2);
        for (std::size_t s = 0; s < sym.size(); ++s) sym[s] = rx_2sps.channels[pidx][2 * s];
        const std::vector<cplx> corr = xcorr_fft(sym, ref_symbols[pidx]);
        if (score.empty()) {
            m = corr.size();
            score.assign(m, 0.0);
        }
        for (std::size_t k = 0; k < m; ++k) score[k] += std::norm(corr[k]);
    }

    long long best_lag = 0;
    double best_v = -1.0;
    const long long mm = static_cast<long long>(m);
    for (long long lag = -max_lag_symbols; lag <= max_lag_symbols; ++lag) {
        const double v = score[static_cast<std::size_t>(((lag % mm) + mm) % mm)];
        if (v > best_v) {
            best_v = v;
            best_lag = lag;
        }
    }
    return best_lag;
}

} // namespace mdmsim
