// SPDX-License-Identifier: Apache-2.0
#include "mdmsim/dsp_util.hpp"

#include <cmath>
#include <stdexcept>

#include "mdmsim/fft.hpp"

namespace mdmsim {

void frequency_shift(std::vector<cplx>& x, double freq_hz, double fs, double phase0) {
    if (freq_hz == 0.0 && phase0 == 0.0) return;
    const double step = 2.0 * M_PI * freq_hz / fs;
    // Recurrence with periodic renormalization keeps the rotator on the unit
    // circle without a trig call per sample.
    cplx rot = std::polar(1.0, phase0);
    const cplx inc = std::polar(1.0, step);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] *= rot;
        rot *= inc;
        if ((i & 0xfff) == 0xfff) rot /= std::abs(rot);
    }
}

void frequency_shift(ComplexFrame& x, double freq_hz, double phase0) {
    for (auto& ch : x.channels) frequency_shift(ch, freq_hz, x.sample_rate_hz, phase0);
}

std::vector<cplx> brickwall_lowpass(const std::vector<cplx>& x, double cutoff_hz, double fs) {
    if (!(cutoff_hz > 0.0)) throw std::invalid_argument("brickwall_lowpass: cutoff must be > 0");
    if (x.empty()) return {};
    std::vector<cplx> spec = fft(x);
    const std::size_t n = spec.size();
    for (std::size_t k = 0; k < n; ++k)
        if (std::abs(bin_frequency(k, n, fs)) > cutoff_hz) spec[k] = 0.0;
    return ifft(std::move(spec));
}

std::vector<double> power_spectrum(const std::vector<cplx>& x) {
    std::vector<cplx> spec = fft(x);
    std::vector<double> p(spec.size());
    const double scale = 1.0 / static_cast<double>(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i) p[i] = std::norm(spec[i]) * scale;
    return p;
}

std::vector<cplx> cyclic_shift(const std::vector<cplx>& x, long long shift) {
    const long long n = static_cast<long long>(x.size());
    if (n == 0) return {};
    long long s = shift % n;
    if (s < 0) s += n;
    std::vector<cplx> y(x.size());
    for (long long i = 0; i < n; ++i) y[(i + s) % n] = x[i];
    return y;
}

double db10(double linear) { return 10.0 * std::log10(linear); }
double undb10(double db) { return std::pow(10.0, db / 10.0); }

} // namespace mdmsim
