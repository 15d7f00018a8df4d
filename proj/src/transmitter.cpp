// SPDX-License-Identifier: Apache-2.0
#include "mdmsim/transmitter.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "mdmsim/dsp_util.hpp"
#include "mdmsim/fft.hpp"
#include "mdmsim/fir.hpp"
#include "mdmsim/prbs.hpp"
#include "mdmsim/rng.hpp"

namespace mdmsim {

namespace {
constexpr double kSpeedOfLight = 299792458.0;
constexpr int kPrbsDegree = 23; // period >> frame length, no in-frame repetition
} // namespace

const char* mode_name(SpatialMode m) {
    switch (m) {
        case SpatialMode::LP01: return "LP01";
        case SpatialMode::LP11a: return "LP11a";
        case SpatialMode::LP11b: return "LP11b";
        case SpatialMode::LP21a: return "LP21a";
        case SpatialMode::LP21b: return "LP21b";
        case SpatialMode::LP02: return "LP02";
    }
    return "?";
}

SpatialMode mode_from_name(const std::string& name) {
    for (SpatialMode m : kModeOrder)
        if (name == mode_name(m)) return m;
    throw std::invalid_argument("unknown spatial mode: " + name);
}

int mode_group(SpatialMode m) {
    switch (m) {
        case SpatialMode::LP01: return 0;
        case SpatialMode::LP11a:
        case SpatialMode::LP11b: return 1;
        default: return 2;
    }
}

void PreEmphasisCurve::validate() const {
    if (freq_hz.empty() || freq_hz.size() != gain.size())
        throw std::invalid_argument("pre_emphasis: empty or mismatched curve");
    for (std::size_t i = 1; i < freq_hz.size(); ++i)
        if (freq_hz[i] <= freq_hz[i - 1])
            throw std::invalid_argument("pre_emphasis: frequencies must be increasing");
    for (double g : gain)
        if (!(g > 0.0)) throw std::invalid_argument("pre_emphasis: response must be strictly positive");
}

double PreEmphasisCurve::gain_at(double f) const {
    f = std::abs(f);
    if (f <= freq_hz.front()) return gain.front();
    if (f >= freq_hz.back()) return gain.back();
    const auto it = std::upper_bound(freq_hz.begin(), freq_hz.end(), f);
    const std::size_t i = static_cast<std::size_t>(it - freq_hz.begin());
    const double t = (f - freq_hz[i - 1]) / (freq_hz[i] - freq_hz[i - 1]);
    return gain[i - 1] + t * (gain[i] - gain[i - 1]);
}

void TxConfig::validate() const {
    if (!(baud_hz > 0.0)) throw std::invalid_argument("tx: baud must be > 0");
    if (samples_per_symbol < 2) throw std::invalid_argument("tx: samples_per_symbol must be >= 2");
    if (n_symbols < 16) throw std::invalid_argument("tx: n_symbols must be >= 16");
    rrc.validate();
    if (rrc.samples_per_symbol != samples_per_symbol)
        throw std::invalid_argument("tx: rrc.samples_per_symbol must match samples_per_symbol");
    if (active_modes.empty()) throw std::invalid_argument("tx: active_modes empty");
    std::set<SpatialMode> seen(active_modes.begin(), active_modes.end());
    if (seen.size() != active_modes.size())
        throw std::invalid_argument("tx: duplicate active modes");
    for (SpatialMode m : active_modes) {
        const std::size_t port = static_cast<std::size_t>(m);
        if (port >= decorrelation_delays_m.size())
            throw std::invalid_argument("tx: no decorrelation delay for mode " +
                                        std::string(mode_name(m)));
        if (decorrelation_delays_m[port] < 0.0)
            throw std::invalid_argument("tx: decorrelation delays must be >= 0");
    }
    if (pre_emphasis) pre_emphasis->validate();
}

Tributary build_tributary(const TxConfig& cfg, std::uint64_t tributary_seed) {
    cfg.validate();
    const Constellation c = make_8qam_circular();

    Tributary t;
    const std::uint32_t reg = static_cast<std::uint32_t>(
        mix_seed({tributary_seed, 0xb175u}) & ((1u << kPrbsDegree) - 1u)) | 1u;
    t.bits = generate_prbs(kPrbsDegree,
                           static_cast<std::size_t>(cfg.n_symbols) * c.bits_per_symbol, reg);
    t.symbols = map_symbols(t.bits, c);

    // Impulse train at the symbol positions, then pulse shaping. Shaping is
    // circular: the frame is one period of a repeating pattern, so cyclic
    // decorrelation shifts stay seamless and symbol s is centered on sample
    // s*sps with no warm-up transient.
    const int sps = cfg.samples_per_symbol;
    std::vector<cplx> wave(static_cast<std::size_t>(cfg.n_symbols) * sps, 0.0);
    for (int s = 0; s < cfg.n_symbols; ++s)
        wave[static_cast<std::size_t>(s) * sps] = t.symbols[static_cast<std::size_t>(s)];
    wave = cyclic_filter_channel(wave, design_rrc(cfg.rrc));

    if (cfg.pre_emphasis) {
        ComplexFrame f(1, wave.size(), cfg.sample_rate_hz());
        f.channels[0] = std::move(wave);
        wave = apply_pre_emphasis(f, *cfg.pre_emphasis).channels[0];
    }

    double p = 0.0;
    for (const cplx& v : wave) p += std::norm(v);
    p /= static_cast<double>(wave.size());
    const double scale = 1.0 / std::sqrt(p);
    for (cplx& v : wave) v *= scale;

    t.wave = std::move(wave);
    return t;
}

std::pair<ComplexFrame, TxReference> assemble_spatial_frame(const TxConfig& cfg) {
    cfg.validate();

    // One PM pair feeds every mode, as when a single transmitter output is
    // split across the launch paths; modes are decorrelated purely by delay.
    const Tributary pol_x = build_tributary(cfg, mix_seed({cfg.seed, 0}));
    const Tributary pol_y = build_tributary(cfg, mix_seed({cfg.seed, 1}));
    const Tributary* pols[2] = {&pol_x, &pol_y};

    const double fs = cfg.sample_rate_hz();
    const int sps = cfg.samples_per_symbol;
    const std::size_t n_streams = cfg.active_modes.size() * 2;

    ComplexFrame frame(n_streams, pol_x.wave.size(), fs);
    TxReference ref;
    ref.constellation = make_8qam_circular();
    ref.baud_hz = cfg.baud_hz;
    ref.rrc = cfg.rrc;
    ref.symbols.resize(n_streams);
    ref.bits.resize(n_streams);
    ref.delay_samples.resize(n_streams);
    ref.modes.resize(n_streams);

    for (std::size_t mi = 0; mi < cfg.active_modes.size(); ++mi) {
        const SpatialMode mode = cfg.active_modes[mi];
        const double delay_m = cfg.decorrelation_delays_m[static_cast<std::size_t>(mode)];
        const long long d = std::llround(delay_m * cfg.group_index / kSpeedOfLight * fs);
        const long long d_sym = std::llround(static_cast<double>(d) / sps);

        for (int pol = 0; pol < 2; ++pol) {
            const std::size_t s = mi * 2 + static_cast<std::size_t>(pol);
            const Tributary& trib = *pols[pol];
            frame.channels[s] = cyclic_shift(trib.wave, d);
            ref.delay_samples[s] = d;
            ref.modes[s] = mode;

            // Rotate the symbol/bit streams so reference index k matches the
            // symbol under sample sps*k of the delayed waveform; the residual
            // sub-symbol offset (|d - sps*d_sym| <= 1 sample) is left to the
            // fractionally spaced equalizer.
            const std::size_t n = trib.symbols.size();
            const long long shift = ((d_sym % static_cast<long long>(n)) +
                                     static_cast<long long>(n)) % static_cast<long long>(n);
            std::vector<cplx> sym(n);
            std::vector<std::uint8_t> bits(trib.bits.size());
            const int m = ref.constellation.bits_per_symbol;
            for (std::size_t k = 0; k < n; ++k) {
                const std::size_t src = (k + n - static_cast<std::size_t>(shift)) % n;
                sym[k] = trib.symbols[src];
                for (int b = 0; b < m; ++b)
                    bits[k * m + b] = trib.bits[src * m + b];
            }
            ref.symbols[s] = std::move(sym);
            ref.bits[s] = std::move(bits);
        }
    }
    return {std::move(frame), std::move(ref)};
}

ComplexFrame apply_pre_emphasis(const ComplexFrame& x, const PreEmphasisCurve& response) {
    response.validate();
    x.validate();

    ComplexFrame y = x;
    const std::size_t n = x.length();
    std::vector<double> bin_gain(n);
    for (std::size_t k = 0; k < n; ++k)
        bin_gain[k] = response.gain_at(bin_frequency(k, n, x.sample_rate_hz));

    for (auto& ch : y.channels) {
        double e_in = 0.0;
        for (const cplx& v : ch) e_in += std::norm(v);
        std::vector<cplx> spec = fft(ch);
        for (std::size_t k = 0; k < n; ++k) spec[k] *= bin_gain[k];
        ch = ifft(std::move(spec));
        double e_out = 0.0;
        for (const cplx& v : ch) e_out += std::norm(v);
        if (e_out > 0.0) {
            const double s = std::sqrt(e_in / e_out);
            for (cplx& v : ch) v *= s;
        }
    }
    return y;
}

} // namespace mdmsim
