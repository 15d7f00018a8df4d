// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mdmsim/constellation.hpp"
#include "mdmsim/frame.hpp"
#include "mdmsim/rrc.hpp"

namespace mdmsim {

enum class SpatialMode { LP01 = 0, LP11a, LP11b, LP21a, LP21b, LP02 };

inline constexpr std::array<SpatialMode, 6> kModeOrder = {
    SpatialMode::LP01,  SpatialMode::LP11a, SpatialMode::LP11b,
    SpatialMode::LP21a, SpatialMode::LP21b, SpatialMode::LP02};

const char* mode_name(SpatialMode m);
SpatialMode mode_from_name(const std::string& name);

/// Mode-group index per mode in kModeOrder order: LP01 -> 0, LP11a/b -> 1,
/// LP21a/b + LP02 -> 2.
int mode_group(SpatialMode m);

/// Real, strictly positive frequency-response curve, linear gain over |f|.
/// Values between grid points are interpolated linearly; outside the grid the
/// nearest endpoint holds.
struct PreEmphasisCurve {
    std::vector<double> freq_hz;
    std::vector<double> gain;

    void validate() const;
    double gain_at(double f) const;
};

struct TxConfig {
    double baud_hz = 33.33e9;
    int samples_per_symbol = 3;
    int n_symbols = 1 << 16;
    RrcSpec rrc{0.01, 256, 3};
    std::vector<SpatialMode> active_modes{kModeOrder.begin(), kModeOrder.end()};
    std::vector<double> decorrelation_delays_m{0, 20, 30, 50, 60, 80};
    std::optional<PreEmphasisCurve> pre_emphasis;
    double group_index = 1.468;
    std::uint64_t seed = 1;

    double sample_rate_hz() const { return baud_hz * samples_per_symbol; }
    void validate() const;
};

/// One polarization tributary: shaped waveform plus the data it carries.
struct Tributary {
    std::vector<cplx> wave;
    std::vector<cplx> symbols;
    std::vector<std::uint8_t> bits;
};

/// Per-stream reference data for equalizer training and GMI, delay-adjusted
/// exactly like the corresponding frame channel. Streams are mode-major, the
/// two polarizations of a mode adjacent (mode0-x, mode0-y, mode1-x, ...).
struct TxReference {
    Constellation constellation;
    std::vector<std::vector<cplx>> symbols;
    std::vector<std::vector<std::uint8_t>> bits;
    std::vector<long long> delay_samples;  // cyclic shift applied at tx rate
    std::vector<SpatialMode> modes;        // one entry per stream
    double baud_hz = 0.0;
    RrcSpec rrc;
};

/// RRC-shaped, oversampled 8QAM waveform for one tributary. Deterministic in
/// (cfg, tributary_seed); unit mean sample power.
Tributary build_tributary(const TxConfig& cfg, std::uint64_t tributary_seed);

/// Full spatial frame: 2 tributaries per active mode, each mode's pair
/// cyclically delayed by its decorrelation path (length * group_index / c,
/// rounded to the nearest sample). Reference data is rotated identically.
std::pair<ComplexFrame, TxReference> assemble_spatial_frame(const TxConfig& cfg);

/// Frequency-domain multiplication by the curve, energy renormalized to the
/// input energy per channel.
ComplexFrame apply_pre_emphasis(const ComplexFrame& x, const PreEmphasisCurve& response);

} // namespace mdmsim
