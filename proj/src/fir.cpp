// SPDX-License-Identifier: Apache-2.0
#include "mdmsim/fir.hpp"

#include <stdexcept>

#include "mdmsim/fft.hpp"

namespace mdmsim {

namespace {

std::vector<cplx> convolve_direct_same(const std::vector<cplx>& x, const std::vector<double>& h) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
    const std::ptrdiff_t l = static_cast<std::ptrdiff_t>(h.size());
    const std::ptrdiff_t delay = (l - 1) / 2;
    std::vector<cplx> y(x.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        cplx acc = 0.0;
        const std::ptrdiff_t full = i + delay; // index into the full convolution
        const std::ptrdiff_t k_lo = std::max<std::ptrdiff_t>(0, full - n + 1);
        const std::ptrdiff_t k_hi = std::min<std::ptrdiff_t>(l - 1, full);
        for (std::ptrdiff_t k = k_lo; k <= k_hi; ++k) acc += h[k] * x[full - k];
        y[i] = acc;
    }
    return y;
}

std::vector<cplx> convolve_fft_same(const std::vector<cplx>& x, const std::vector<double>& h) {
    const std::size_t n = x.size();
    const std::size_t l = h.size();
    const std::size_t full = n + l - 1;
    // FFTW is fine with any length; round up to even to keep Hermitian bins tidy.
    const std::size_t m = full + (full % 2);

    std::vector<cplx> xf(m, 0.0);
    std::copy(x.begin(), x.end(), xf.begin());
    std::vector<cplx> hf(m, 0.0);
    for (std::size_t i = 0; i < l; ++i) hf[i] = h[i];
    fft_inplace(xf, false);
    fft_inplace(hf, false);
    for (std::size_t i = 0; i < m; ++i) xf[i] *= hf[i];
    fft_inplace(xf, true);

    const std::size_t delay = (l - 1) / 2;
    std::vector<cplx> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = xf[i + delay];
    return y;
}

} // namespace

std::vector<cplx> fir_filter_channel(const std::vector<cplx>& x, const std::vector<double>& taps) {
    if (taps.empty()) throw std::invalid_argument("fir_filter: empty taps");
    if (x.empty()) return {};
    const double cost = static_cast<double>(x.size()) * static_cast<double>(taps.size());
    if (cost > 4.0e6 && taps.size() > 32) return convolve_fft_same(x, taps);
    return convolve_direct_same(x, taps);
}

std::vector<cplx> cyclic_filter_channel(const std::vector<cplx>& x, const std::vector<double>& taps) {
    if (taps.empty()) throw std::invalid_argument("fir_filter: empty taps");
    if (x.size() < taps.size())
        throw std::invalid_argument("cyclic_filter: block shorter than the taps");
    const std::size_t n = x.size();
    const std::size_t l = taps.size();
    const std::size_t mid = (l - 1) / 2;

    std::vector<cplx> hf(n, 0.0);
    for (std::size_t i = 0; i < l; ++i) {
        const std::size_t pos = (n + i - mid) % n;
        hf[pos] += taps[i];
    }
    fft_inplace(hf, false);
    std::vector<cplx> xf = fft(x);
    for (std::size_t i = 0; i < n; ++i) xf[i] *= hf[i];
    fft_inplace(xf, true);
    return xf;
}

ComplexFrame fir_filter(const ComplexFrame& x, const std::vector<double>& taps) {
    if (taps.empty()) throw std::invalid_argument("fir_filter: empty taps");
    x.validate();
    ComplexFrame y = x;
    for (auto& ch : y.channels) ch = fir_filter_channel(ch, taps);
    return y;
}

} // namespace mdmsim
