// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mdmsim/constellation.hpp"
#include "mdmsim/frame.hpp"
#include "mdmsim/rrc.hpp"

namespace mdmsim {

struct EqualizerConfig {
    int n_taps = 51;            // odd, T/2 spaced
    double step_train = 1e-3;
    double step_dd = 1e-4;
    int bps_test_phases = 32;   // candidates over [-pi/4, pi/4)
    int bps_window = 64;        // symbols in the sliding metric
    int n_train_symbols = 20000;
    int train_passes = 2;       // extra data-aided sweeps over the prefix before the DD run
    double divergence_power_ratio = 10.0;
    int divergence_symbols = 1000;
    // Input frames are rescaled so the LMS correlation-matrix trace sits near
    // this value; the step-size defaults are calibrated against it and stay
    // valid across butterfly dimensions.
    double trace_target = 150.0;

    void validate() const;
};

/// Butterfly tap tensor [n_out][n_in][n_taps] at 2 samples/symbol.
struct EqualizerState {
    int n_out = 0;
    int n_in = 0;
    int n_taps = 0;
    std::vector<cplx> taps;

    EqualizerState() = default;
    EqualizerState(int out, int in, int len)
        : n_out(out), n_in(in), n_taps(len),
          taps(static_cast<std::size_t>(out) * in * len, cplx(0.0, 0.0)) {}

    cplx& tap(int o, int i, int l) {
        return taps[(static_cast<std::size_t>(o) * n_in + i) * n_taps + l];
    }
    cplx tap(int o, int i, int l) const {
        return taps[(static_cast<std::size_t>(o) * n_in + i) * n_taps + l];
    }
};

/// Raised when the adaptation blows up; carries the tap snapshot at detection.
struct EqualizerDivergence : std::runtime_error {
    EqualizerState snapshot;
    EqualizerDivergence(const std::string& msg, EqualizerState st)
        : std::runtime_error(msg), snapshot(std::move(st)) {}
};

struct EqualizeResult {
    std::vector<std::vector<cplx>> symbols;     // per stream, measurement region only
    std::vector<std::vector<double>> phase_track;
    std::vector<double> error_history;          // windowed |e|^2 during the first pass
    EqualizerState state;
    int first_symbol = 0;                        // frame symbol index of symbols[i][0]
};

/// Decision-directed LMS butterfly with in-loop blind phase search. The first
/// n_train_symbols of each run are data-aided (repeated train_passes times);
/// the decision-directed remainder is emitted. Reference stream i must be
/// aligned so output symbol s compares against refs[i][s mod len].
EqualizeResult mimo_equalize(const ComplexFrame& rx_2sps,
                             const std::vector<std::vector<cplx>>& refs,
                             const Constellation& c, const EqualizerConfig& cfg);

/// Same forward pass and phase tracking with frozen taps.
EqualizeResult apply_taps(const ComplexFrame& rx_2sps, const EqualizerState& state,
                          const std::vector<std::vector<cplx>>& refs, const Constellation& c,
                          const EqualizerConfig& cfg);

struct RxSelection {
    int transmitted_modes = 6;
    int received_modes = 6;

    void validate(int available_modes) const;
};

/// First k modes' tributaries in the fixed mode order (2k channels).
ComplexFrame select_receivers(const ComplexFrame& rx, const RxSelection& sel);

struct FreqOffsetEstimate {
    double offset_hz = 0.0;
    double confidence_db = 0.0; // spectral line over median floor
    bool low_confidence = false;
};

/// Data-aided carrier offset estimate: the spectrum of rx * conj(reference
/// waveform) carries a line at the offset; peaks are accumulated over a few
/// channel/reference pairs and refined by parabolic interpolation.
FreqOffsetEstimate estimate_frequency_offset(const ComplexFrame& rx_2sps,
                                             const std::vector<std::vector<cplx>>& ref_symbols,
                                             const RrcSpec& shaping, double search_hz = 250e6);

/// Symbol-level alignment of a matched-filtered 2 sps frame against the
/// reference symbol streams: the symbol-rate decimated channels are
/// cross-correlated with the references and the peak within +/-
/// max_lag_symbols is returned. rx symbol s corresponds to reference symbol
/// s - lag.
long long align_to_reference(const ComplexFrame& rx_2sps,
                             const std::vector<std::vector<cplx>>& ref_symbols,
                             long long max_lag_symbols);

/// Tap tensor persistence in the structured-text matrix format (one matrix of
/// taps per output stream, rows = inputs).
void save_taps(const EqualizerState& state, const std::string& path);
EqualizerState load_taps(const std::string& path);

} // namespace mdmsim
