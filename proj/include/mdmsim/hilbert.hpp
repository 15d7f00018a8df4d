// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

namespace mdmsim {

/// Discrete Hilbert transform via frequency-domain -j*sgn(f) weighting; the DC
/// and Nyquist bins are zeroed. Requires even length >= 2. cos -> sin for any
/// in-band tone; applying twice negates the zero-DC part of the input.
std::vector<double> hilbert_transform(const std::vector<double>& x);

} // namespace mdmsim
