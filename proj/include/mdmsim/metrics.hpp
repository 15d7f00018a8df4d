// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "mdmsim/constellation.hpp"
#include "mdmsim/equalizer.hpp"
#include "mdmsim/frame.hpp"

namespace mdmsim {

struct FecModel {
    double code_rate = 0.8402;
    double ngmi_threshold = 0.8798;

    double overhead_pct() const { return (1.0 / code_rate - 1.0) * 100.0; }
    void validate() const;
};

struct RateReport {
    double line_rate_gbps = 0.0;
    double net_rate_gbps = 0.0;
    double ngmi = 0.0;
    bool below_threshold = false;
};

struct CrosstalkMatrices {
    Eigen::MatrixXd spatial_db; // rows: received mode, cols: transmitted mode
    Eigen::MatrixXd group_db;   // mode-group averaged
};

struct MetricsReport {
    std::vector<std::string> mode_names;
    std::vector<double> gmi_per_mode;       // polarization-averaged
    std::vector<double> gmi_per_stream;
    std::vector<double> evm_per_stream_pct;
    std::vector<double> snr_per_stream_db;
    double ngmi = 0.0;
    double line_rate_gbps = 0.0;
    double net_rate_gbps = 0.0;
    bool below_fec = false;
    double mdl_db = 0.0;
    Eigen::MatrixXd xt_spatial_db;
    Eigen::MatrixXd xt_group_db;
    double freq_offset_hz = 0.0;
    double foe_confidence_db = 0.0;
    double baud_hz = 0.0;
    int n_streams = 0;
    int bits_per_symbol = 3;
    FecModel fec;
    int n_captures = 1;
};

/// Memoryless AWGN-law GMI in bits/symbol: per-bit LLRs from a Gaussian
/// channel with gain and noise variance estimated from the data, clamped to
/// [0, m]. Throws an alignment error when the hard-decision BER exceeds 0.4.
double compute_gmi(const std::vector<cplx>& rx_symbols, const std::vector<std::uint8_t>& ref_bits,
                   const Constellation& c);

/// Line and net rate from per-mode GMI: line = n_streams * baud * m; the net
/// rate applies the code rate when mean(gmi)/m clears the NGMI threshold and
/// is reported as zero (flagged) otherwise.
RateReport net_rate(const std::vector<double>& gmi_per_mode, double baud_hz, const FecModel& fec,
                    int n_streams, int bits_per_symbol = 3);

/// MDL in dB: eigenvalues of H^H H per frequency, sorted, averaged over
/// frequency index-wise; 10*log10(max/min) of the averages. Requires
/// cols <= rows for every matrix.
double compute_mdl(const std::vector<Eigen::MatrixXcd>& h_of_f);

/// Channel MDL estimated from converged equalizer taps: per frequency bin the
/// tap response W(f) is treated as the channel inverse, so the channel
/// eigenvalue set is the elementwise inverse of the W W^H spectrum (the
/// pseudo-inverse route). Averaging is restricted to |f| <= band_fraction of
/// the symbol rate (taps are T/2 spaced, so bins span +/- the symbol rate).
double mdl_from_taps(const EqualizerState& taps, double band_fraction = 0.48, int n_fft = 256);

/// Fig-style crosstalk matrices from taps: entry (i, j) = (sum_l |w(i,j,l)|)^2,
/// polarization combinations averaged per spatial mode pair, then mode-group
/// averaged; both in dB relative to the matrix maximum with a -60 dB floor.
CrosstalkMatrices crosstalk_matrices(const EqualizerState& taps,
                                     const std::vector<int>& tx_mode_group,
                                     const std::vector<int>& rx_mode_group);

/// Arithmetic mean of GMI/NGMI/MDL/EVM/SNR; crosstalk matrices averaged in the
/// linear domain; rate fields recomputed from the averaged GMI.
MetricsReport average_captures(const std::vector<MetricsReport>& reports);

/// EVM in percent after a data-aided complex gain fit.
double evm_percent(const std::vector<cplx>& rx, const std::vector<cplx>& ref);

/// Data-aided SNR estimate in dB (gain-fitted signal power over residual).
double estimate_snr_db(const std::vector<cplx>& rx, const std::vector<cplx>& ref);

} // namespace mdmsim
