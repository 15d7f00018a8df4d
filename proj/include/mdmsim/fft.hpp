// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "mdmsim/frame.hpp"

namespace mdmsim {

/// In-place DFT. Forward is unscaled; inverse carries the 1/N factor.
/// Thread-safe (FFTW plan creation is serialized internally).
void fft_inplace(std::vector<cplx>& x, bool inverse);

std::vector<cplx> fft(std::vector<cplx> x);
std::vector<cplx> ifft(std::vector<cplx> x);

/// Signed frequency of DFT bin k for an N-point transform at rate fs:
/// bins [0, N/2] map to [0, fs/2], the rest to negative frequencies.
double bin_frequency(std::size_t bin, std::size_t n, double fs);

} // namespace mdmsim
