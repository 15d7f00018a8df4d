// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mdmsim/dsp_util.hpp"
#include "mdmsim/fft.hpp"
#include "mdmsim/fir.hpp"
#include "mdmsim/metrics.hpp"
#include "mdmsim/transmitter.hpp"
#include "test_helpers.hpp"

using namespace mdmsim;

namespace {

TxConfig small_cfg() {
    TxConfig cfg;
    cfg.n_symbols = 1 << 12;
    cfg.seed = 42;
    return cfg;
}

// Cross-correlation peak position between two equal-length channels; cyclic,
// so the result is the delay modulo the frame length.
long long xcorr_peak_lag(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    std::vector<cplx> fa = fft(a);
    const std::vector<cplx> fb = fft(b);
    for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= std::conj(fb[i]);
    fa = ifft(std::move(fa));
    std::size_t best = 0;
    for (std::size_t i = 1; i < fa.size(); ++i)
        if (std::norm(fa[i]) > std::norm(fa[best])) best = i;
    return static_cast<long long>(best);
}

} // namespace

TEST_CASE("build_tributary: frame length, determinism, unit power") {
    TxConfig cfg; // full default: 2^16 symbols at 3 sps
    const Tributary t = build_tributary(cfg, 123);
    CHECK(t.wave.size() == static_cast<std::size_t>(cfg.n_symbols) * 3);
    CHECK(t.symbols.size() == static_cast<std::size_t>(cfg.n_symbols));
    CHECK(t.bits.size() == static_cast<std::size_t>(cfg.n_symbols) * 3);

    double p = 0.0;
    for (const auto& v : t.wave) p += std::norm(v);
    CHECK(p / static_cast<double>(t.wave.size()) == doctest::Approx(1.0).epsilon(1e-9));

    const Tributary again = build_tributary(cfg, 123);
    CHECK(t.wave == again.wave);
    CHECK(t.bits == again.bits);
    const Tributary other = build_tributary(cfg, 124);
    CHECK(t.bits != other.bits);
}

TEST_CASE("build_tributary: occupied band matches the shaped rate") {
    TxConfig cfg = small_cfg();
    const Tributary t = build_tributary(cfg, 7);
    const auto psd = power_spectrum(t.wave);
    const double fs = cfg.sample_rate_hz();

    double peak = 0.0;
    for (double v : psd) peak = std::max(peak, v);
    double out_of_band_max = 0.0;
    const std::size_t n = psd.size();
    for (std::size_t k = 0; k < n; ++k) {
        const double f = std::abs(bin_frequency(k, n, fs));
        if (f > 17.0e9) out_of_band_max = std::max(out_of_band_max, psd[k]);
    }
    CHECK(db10(out_of_band_max / peak) < -30.0);
}

TEST_CASE("assemble_spatial_frame: zero delays give identical mode copies") {
    TxConfig cfg = small_cfg();
    cfg.decorrelation_delays_m = {0, 0, 0, 0, 0, 0};
    const auto [frame, ref] = assemble_spatial_frame(cfg);
    REQUIRE(frame.channel_count() == 12);
    for (std::size_t mode = 1; mode < 6; ++mode) {
        CHECK(frame.channels[2 * mode] == frame.channels[0]);
        CHECK(frame.channels[2 * mode + 1] == frame.channels[1]);
    }
}

TEST_CASE("assemble_spatial_frame: decorrelation shift shows up in the cross-correlation") {
    TxConfig cfg = small_cfg();
    const auto [frame, ref] = assemble_spatial_frame(cfg);
    const double fs = cfg.sample_rate_hz();
    const double c_light = 299792458.0;

    // Channel 0 is LP01-x (0 m), channel 2 is LP11a-x (20 m).
    const long long expect = std::llround(20.0 * cfg.group_index / c_light * fs);
    const long long lag = xcorr_peak_lag(frame.channels[2], frame.channels[0]);
    CHECK(lag == expect % static_cast<long long>(frame.length()));
    CHECK(ref.delay_samples[2] == expect);
    // ~97.9 ns of path delay at the shaped rate.
    CHECK(static_cast<double>(expect) / fs == doctest::Approx(97.93e-9).epsilon(2e-3));
}

TEST_CASE("assemble_spatial_frame: 6 modes give 12 channels, 3 modes give 6") {
    TxConfig cfg = small_cfg();
    const auto [f6, r6] = assemble_spatial_frame(cfg);
    CHECK(f6.channel_count() == 12);
    CHECK(r6.symbols.size() == 12);

    cfg.active_modes = {SpatialMode::LP01, SpatialMode::LP11a, SpatialMode::LP11b};
    const auto [f3, r3] = assemble_spatial_frame(cfg);
    CHECK(f3.channel_count() == 6);
}

TEST_CASE("assemble_spatial_frame: distinct delays decorrelate at zero lag") {
    TxConfig cfg = small_cfg();
    const auto [frame, ref] = assemble_spatial_frame(cfg);
    const auto& a = frame.channels[0];
    for (std::size_t mode = 1; mode < 6; ++mode) {
        const auto& b = frame.channels[2 * mode];
        cplx acc = 0.0;
        double pa = 0.0, pb = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            acc += a[i] * std::conj(b[i]);
            pa += std::norm(a[i]);
            pb += std::norm(b[i]);
        }
        const double rho = std::abs(acc) / std::sqrt(pa * pb);
        CHECK(rho < 0.1);
    }
}

TEST_CASE("assemble_spatial_frame: references re-derived by matched filtering") {
    TxConfig cfg = small_cfg();
    const auto [frame, ref] = assemble_spatial_frame(cfg);
    const auto mf_taps = design_rrc(cfg.rrc);

    for (std::size_t ch : {std::size_t{0}, std::size_t{3}, std::size_t{10}}) {
        const auto filtered = fir_filter_channel(frame.channels[ch], mf_taps);
        std::vector<cplx> sampled;
        std::vector<cplx> want;
        const int sps = cfg.samples_per_symbol;
        const int span_guard = cfg.rrc.span_symbols;
        // Delays round to samples, not symbols; sample on the channel's own
        // symbol phase (the sub-symbol remainder of its decorrelation shift).
        const long long d = ref.delay_samples[ch];
        const int phase = static_cast<int>(d - sps * std::llround(static_cast<double>(d) / sps));
        for (int s = span_guard; s < cfg.n_symbols - span_guard; ++s) {
            sampled.push_back(filtered[static_cast<std::size_t>(s * sps + phase)]);
            want.push_back(ref.symbols[ch][static_cast<std::size_t>(s)]);
        }
        CHECK(evm_percent(sampled, want) < 1.0);
    }
}

TEST_CASE("apply_pre_emphasis: flat response is the identity after renormalization") {
    TxConfig cfg = small_cfg();
    const Tributary t = build_tributary(cfg, 3);
    ComplexFrame x(1, t.wave.size(), cfg.sample_rate_hz());
    x.channels[0] = t.wave;

    PreEmphasisCurve flat;
    flat.freq_hz = {0.0, 50e9};
    flat.gain = {2.5, 2.5};
    const auto y = apply_pre_emphasis(x, flat);
    for (std::size_t i = 0; i < x.length(); ++i)
        CHECK(std::abs(y.channels[0][i] - x.channels[0][i]) < 1e-9);
}

TEST_CASE("apply_pre_emphasis: inverse of a first-order low-pass flattens it") {
    TxConfig cfg = small_cfg();
    const Tributary t = build_tributary(cfg, 5);
    ComplexFrame x(1, t.wave.size(), cfg.sample_rate_hz());
    x.channels[0] = t.wave;
    const double fs = cfg.sample_rate_hz();
    const double fc = 20e9;

    PreEmphasisCurve inverse;
    for (int i = 0; i <= 256; ++i) {
        const double f = fs / 2.0 * i / 256.0;
        inverse.freq_hz.push_back(f);
        inverse.gain.push_back(std::sqrt(1.0 + (f / fc) * (f / fc)));
    }
    const auto pre = apply_pre_emphasis(x, inverse);

    // Apply the low-pass the curve inverts, then compare in-band spectra.
    const std::size_t n = pre.length();
    std::vector<cplx> spec = fft(pre.channels[0]);
    for (std::size_t k = 0; k < n; ++k) {
        const double f = bin_frequency(k, n, fs);
        spec[k] /= std::sqrt(1.0 + (f / fc) * (f / fc));
    }
    const auto cascade = ifft(std::move(spec));

    const auto p_in = power_spectrum(x.channels[0]);
    const auto p_out = power_spectrum(cascade);
    const auto band_power = [&](const std::vector<double>& p, double f_lo, double f_hi) {
        double acc = 0.0;
        std::size_t cnt = 0;
        for (std::size_t k = 0; k < p.size(); ++k) {
            const double f = std::abs(bin_frequency(k, p.size(), fs));
            if (f >= f_lo && f < f_hi) {
                acc += p[k];
                ++cnt;
            }
        }
        return acc / static_cast<double>(cnt);
    };
    const double ref0 = band_power(p_out, 0.0, 1e9) / band_power(p_in, 0.0, 1e9);
    for (double f_lo = 1e9; f_lo < 15e9; f_lo += 1e9) {
        const double r = band_power(p_out, f_lo, f_lo + 1e9) / band_power(p_in, f_lo, f_lo + 1e9);
        CHECK(std::abs(db10(r / ref0)) < 0.05);
    }
}

TEST_CASE("apply_pre_emphasis: energy preserved, nonpositive response rejected") {
    TxConfig cfg = small_cfg();
    const Tributary t = build_tributary(cfg, 9);
    ComplexFrame x(1, t.wave.size(), cfg.sample_rate_hz());
    x.channels[0] = t.wave;

    PreEmphasisCurve tilt;
    tilt.freq_hz = {0.0, 10e9, 50e9};
    tilt.gain = {1.0, 1.5, 3.0};
    const auto y = apply_pre_emphasis(x, tilt);
    double e_in = 0.0, e_out = 0.0;
    for (std::size_t i = 0; i < x.length(); ++i) {
        e_in += std::norm(x.channels[0][i]);
        e_out += std::norm(y.channels[0][i]);
    }
    CHECK(std::abs(e_out / e_in - 1.0) < 1e-9);

    PreEmphasisCurve bad;
    bad.freq_hz = {0.0, 50e9};
    bad.gain = {1.0, 0.0};
    CHECK_THROWS_AS(apply_pre_emphasis(x, bad), std::invalid_argument);
}

TEST_CASE("tx config validation") {
    TxConfig cfg = small_cfg();
    cfg.baud_hz = -1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = small_cfg();
    cfg.active_modes = {SpatialMode::LP01, SpatialMode::LP01};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = small_cfg();
    cfg.decorrelation_delays_m = {0, 20};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
