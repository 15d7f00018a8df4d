// SPDX-License-Identifier: Apache-2.0
#include "mdmsim/rrc.hpp"

#include <cmath>
#include <stdexcept>

namespace mdmsim {

void RrcSpec::validate() const {
    if (roll_off < 0.0 || roll_off > 1.0)
        throw std::invalid_argument("rrc: roll_off outside [0, 1]");
    if (span_symbols < 2 || span_symbols % 2 != 0)
        throw std::invalid_argument("rrc: span_symbols must be even and >= 2");
    if (samples_per_symbol < 2)
        throw std::invalid_argument("rrc: samples_per_symbol must be >= 2");
}

namespace {

// Continuous RRC impulse response at t (in symbol periods), unit symbol rate.
double rrc_value(double t, double beta) {
    constexpr double eps = 1e-10;
    if (std::abs(t) < eps) {
        return 1.0 + beta * (4.0 / M_PI - 1.0);
    }
    if (beta > 0.0 && std::abs(std::abs(t) - 1.0 / (4.0 * beta)) < eps) {
        const double a = M_PI / (4.0 * beta);
        return beta / std::sqrt(2.0) *
               ((1.0 + 2.0 / M_PI) * std::sin(a) + (1.0 - 2.0 / M_PI) * std::cos(a));
    }
    const double num = std::sin(M_PI * t * (1.0 - beta)) +
                       4.0 * beta * t * std::cos(M_PI * t * (1.0 + beta));
    const double den = M_PI * t * (1.0 - 16.0 * beta * beta * t * t);
    return num / den;
}

} // namespace

std::vector<double> design_rrc(const RrcSpec& spec) {
    spec.validate();
    const int sps = spec.samples_per_symbol;
    const int n = spec.span_symbols * sps + 1;
    const int mid = (n - 1) / 2;

    std::vector<double> taps(n);
    for (int i = 0; i < n; ++i)
        taps[i] = rrc_value(static_cast<double>(i - mid) / sps, spec.roll_off);

    double energy = 0.0;
    for (double t : taps) energy += t * t;
    const double scale = 1.0 / std::sqrt(energy);
    for (double& t : taps) t *= scale;
    return taps;
}

} // namespace mdmsim
