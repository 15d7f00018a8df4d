// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>
#include <vector>

#include "mdmsim/frame.hpp"

namespace mdmsim {

/// Rational-ratio resampling by p/q with anti-alias filtering (Kaiser-windowed
/// sinc interpolation against the lower of the two Nyquist bands). Output
/// length ceil(n*p/q); the time origin is preserved (output sample k sits at
/// input time k*q/p). Tones below 0.45x the lower rate keep their amplitude
/// within 0.1 dB.
std::vector<cplx> resample_channel(const std::vector<cplx>& x, int p, int q);

ComplexFrame resample(const ComplexFrame& x, int p, int q);

/// Exact (or near-exact) rational approximation fs_out/fs_in via continued
/// fractions, denominator bounded; throws if no ratio within 1e-9 relative.
std::pair<int, int> rational_rate_ratio(double fs_in, double fs_out, int max_den = 1 << 20);

} // namespace mdmsim
