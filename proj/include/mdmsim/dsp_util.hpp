// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "mdmsim/frame.hpp"

namespace mdmsim {

/// In-place multiply by exp(+j*2*pi*freq*n/fs); sample 0 gets phase `phase0`.
void frequency_shift(std::vector<cplx>& x, double freq_hz, double fs, double phase0 = 0.0);

void frequency_shift(ComplexFrame& x, double freq_hz, double phase0 = 0.0);

/// Zero-phase brick-wall low-pass: FFT mask keeping |f| <= cutoff_hz.
std::vector<cplx> brickwall_lowpass(const std::vector<cplx>& x, double cutoff_hz, double fs);

/// |FFT(x)|^2 / N. No windowing; callers that need leakage control window first.
std::vector<double> power_spectrum(const std::vector<cplx>& x);

/// Cyclic rotation by `shift` samples (positive delays the signal).
std::vector<cplx> cyclic_shift(const std::vector<cplx>& x, long long shift);

double db10(double linear);
double undb10(double db);

} // namespace mdmsim
