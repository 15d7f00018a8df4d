// SPDX-License-Identifier: Apache-2.0
#include "mdmsim/hilbert.hpp"

#include <stdexcept>

#include "mdmsim/fft.hpp"

namespace mdmsim {

std::vector<double> hilbert_transform(const std::vector<double>& x) {
    const std::size_t n = x.size();
    if (n < 2) throw std::invalid_argument("hilbert: length must be >= 2");
    if (n % 2 != 0) throw std::invalid_argument("hilbert: length must be even");

    std::vector<cplx> spec(n);
    for (std::size_t i = 0; i < n; ++i) spec[i] = x[i];
    fft_inplace(spec, false);

    const cplx mj(0.0, -1.0);
    const cplx pj(0.0, 1.0);
    spec[0] = 0.0;
    spec[n / 2] = 0.0;
    for (std::size_t k = 1; k < n / 2; ++k) spec[k] *= mj;
    for (std::size_t k = n / 2 + 1; k < n; ++k) spec[k] *= pj;
    fft_inplace(spec, true);

    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = spec[i].real();
    return y;
}

} // namespace mdmsim
