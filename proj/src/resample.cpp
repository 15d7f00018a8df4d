// SPDX-License-Identifier: Apache-2.0
#include "mdmsim/resample.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mdmsim {

namespace {

double bessel_i0(double x) {
    // Power series; converges quickly for the argument range of Kaiser windows.
    double sum = 1.0, term = 1.0;
    const double q = 0.25 * x * x;
    for (int k = 1; k < 64; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return sum;
}

// Interpolation kernel sampled on a dense grid: windowed sinc with cutoff a
// little below the lower Nyquist band, normalized to unit DC gain.
struct Kernel {
    std::vector<double> table; // g(u), u = i / kGrid, i in [0, half*kGrid]
    int half = 0;
    static constexpr int kGrid = 256;

    Kernel(int p, int q) {
        const double band = std::min(1.0, static_cast<double>(p) / q); // lower Nyquist, input units
        const double fc = 0.49 * band;
        const double beta = 9.6; // ~96 dB Kaiser sidelobes
        half = static_cast<int>(std::ceil(39.0 / band));
        const int n = half * kGrid + 1;
        table.resize(n);
        const double i0b = bessel_i0(beta);
        for (int i = 0; i < n; ++i) {
            const double u = static_cast<double>(i) / kGrid;
            const double s = (u == 0.0) ? 2.0 * fc : std::sin(2.0 * M_PI * fc * u) / (M_PI * u);
            const double w = u / half;
            table[i] = s * bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - w * w))) / i0b;
        }
        double dc = table[0];
        for (int k = 1; k <= half; ++k) dc += 2.0 * table[k * kGrid];
        for (double& v : table) v /= dc;
    }

    double operator()(double u) const {
        u = std::abs(u) * kGrid;
        const int i = static_cast<int>(u);
        if (i + 1 >= static_cast<int>(table.size())) return 0.0;
        const double f = u - i;
        return table[i] + f * (table[i + 1] - table[i]);
    }
};

} // namespace

std::vector<cplx> resample_channel(const std::vector<cplx>& x, int p, int q) {
    if (p < 1 || q < 1) throw std::invalid_argument("resample: p, q must be >= 1");
    const int g = std::gcd(p, q);
    p /= g;
    q /= g;
    if (p == 1 && q == 1) return x;
    if (x.empty()) return {};

    const Kernel kernel(p, q);
    const std::ptrdiff_t n_in = static_cast<std::ptrdiff_t>(x.size());
    const std::size_t n_out =
        (x.size() * static_cast<std::size_t>(p) + static_cast<std::size_t>(q) - 1) /
        static_cast<std::size_t>(q);

    std::vector<cplx> y(n_out);
    for (std::size_t k = 0; k < n_out; ++k) {
        const std::uint64_t num = static_cast<std::uint64_t>(k) * q;
        const std::ptrdiff_t t_int = static_cast<std::ptrdiff_t>(num / p);
        const double t_frac = static_cast<double>(num % p) / p;
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, t_int - kernel.half + 1);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n_in - 1, t_int + kernel.half);
        cplx acc = 0.0;
        for (std::ptrdiff_t nn = lo; nn <= hi; ++nn)
            acc += x[nn] * kernel(static_cast<double>(t_int - nn) + t_frac);
        y[k] = acc;
    }
    return y;
}

ComplexFrame resample(const ComplexFrame& x, int p, int q) {
    if (p < 1 || q < 1) throw std::invalid_argument("resample: p, q must be >= 1");
    x.validate();
    ComplexFrame y = x;
    for (auto& ch : y.channels) ch = resample_channel(ch, p, q);
    y.sample_rate_hz = x.sample_rate_hz * static_cast<double>(p) / static_cast<double>(q);
    return y;
}

std::pair<int, int> rational_rate_ratio(double fs_in, double fs_out, int max_den) {
    if (!(fs_in > 0.0) || !(fs_out > 0.0))
        throw std::invalid_argument("rational_rate_ratio: rates must be positive");
    const double target = fs_out / fs_in;
    // Continued-fraction convergents.
    double x = target;
    long long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    for (int iter = 0; iter < 64; ++iter) {
        const double a = std::floor(x);
        const long long ai = static_cast<long long>(a);
        const long long h2 = ai * h1 + h0;
        const long long k2 = ai * k1 + k0;
        if (k2 > max_den || h2 > max_den) break;
        h0 = h1; h1 = h2;
        k0 = k1; k1 = k2;
        const double frac = x - a;
        if (frac < 1e-14) break;
        x = 1.0 / frac;
    }
    if (k1 == 0 || h1 == 0)
        throw std::invalid_argument("rational_rate_ratio: no rational approximation in range");
    const double achieved = static_cast<double>(h1) / static_cast<double>(k1);
    if (std::abs(achieved - target) > 1e-9 * target)
        throw std::invalid_argument("rational_rate_ratio: ratio not representable within bounds");
    return {static_cast<int>(h1), static_cast<int>(k1)};
}

} // namespace mdmsim
