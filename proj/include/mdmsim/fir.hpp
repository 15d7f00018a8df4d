// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "mdmsim/frame.hpp"

namespace mdmsim {

/// Per-channel linear convolution with "same" alignment: output length equals
/// input length and the filter group delay floor((L-1)/2) is compensated.
/// Switches to FFT overlap-free convolution for large N*L; both paths agree
/// to better than 1e-10.
ComplexFrame fir_filter(const ComplexFrame& x, const std::vector<double>& taps);

std::vector<cplx> fir_filter_channel(const std::vector<cplx>& x, const std::vector<double>& taps);

/// Circular convolution with the taps centered at lag zero (no group delay,
/// no edge transients). Used where the block is one period of a repeating
/// waveform.
std::vector<cplx> cyclic_filter_channel(const std::vector<cplx>& x, const std::vector<double>& taps);

} // namespace mdmsim
