// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

#include "mdmsim/frame.hpp"

namespace mdmsim {

/// Kramers-Kronig front-end settings for one polarization tributary. The LO
/// tone is added a fixed offset below the signal band, so the composite
/// carrier-plus-signal spectrum is one-sided and (at sufficient CSPR)
/// minimum-phase.
struct KkConfig {
    double lo_offset_hz = 18.5e9;
    double cspr_db = 10.0;
    double adc_rate_hz = 80.0e9;
    double analog_bandwidth_hz = 36.0e9; // brick-wall ahead of the ADC
    double internal_oversampling = 2.0;  // rate factor for the sqrt/log/Hilbert steps
    double output_lowpass_hz = 17.5e9;   // post-downconversion cleanup
    double dc_bias = 0.0;                // used when bias_fixed
    bool bias_fixed = true;
    double bias_low_rel = 0.25;  // golden-section bounds, relative to the a-priori DC
    double bias_high_rel = 4.0;
    double bias_tol_rel = 1e-3;
    int pilot_samples = 16384;

    void validate() const;
};

/// AC-coupled square-law photocurrent |E + A*exp(j*2*pi*f_lo*t)|^2 minus its
/// time average, after the analog-bandwidth brick-wall. The LO amplitude A is
/// set from cspr_db relative to the measured signal power. Also returns the
/// removed DC level through `removed_dc` when non-null.
std::vector<double> photodetect(const ComplexFrame& x, const KkConfig& cfg,
                                double* removed_dc = nullptr);

/// Minimum-phase field of a strictly positive intensity: sqrt(I) with phase
/// equal to the Hilbert transform of 0.5*ln(I). |output|^2 reproduces I
/// exactly. Throws naming the violating sample count if I is not positive.
std::vector<cplx> minimum_phase_field(const std::vector<double>& intensity);

/// Full reconstruction: bias restore, internal upsampling, minimum-phase
/// retrieval, carrier removal, downconversion by lo_offset_hz, low-pass to the
/// signal band, back to the ADC rate. `bias` overrides cfg.dc_bias if >= 0.
ComplexFrame kk_reconstruct(const std::vector<double>& i_ac, double fs, const KkConfig& cfg,
                            double bias = -1.0);

struct BiasOptimum {
    double bias = 0.0;
    double quality = 0.0;
    int evaluations = 0;
};

/// Golden-section search for the bias maximizing the quality functional, which
/// receives the candidate bias and the reconstruction of a mid-frame pilot
/// segment. `dc_guess` anchors the search bounds (bias_low_rel/high_rel).
BiasOptimum optimize_dc_bias(
    const std::vector<double>& i_ac, double fs, const KkConfig& cfg, double dc_guess,
    const std::function<double(double bias, const ComplexFrame& pilot_reconstruction)>& quality);

/// Golden-section maximization on [lo, hi]; f is assumed unimodal.
std::pair<double, int> golden_section_max(const std::function<double(double)>& f, double lo,
                                          double hi, double tol);

} // namespace mdmsim
