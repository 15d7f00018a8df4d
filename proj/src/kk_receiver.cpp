// SPDX-License-Identifier: Apache-2.0
#include "mdmsim/kk_receiver.hpp"

#include <cmath>
#include <stdexcept>

#include "mdmsim/dsp_util.hpp"
#include "mdmsim/fft.hpp"
#include "mdmsim/hilbert.hpp"
#include "mdmsim/resample.hpp"

namespace mdmsim {

void KkConfig::validate() const {
    if (!(lo_offset_hz > 0.0)) throw std::invalid_argument("kk: lo_offset_hz must be > 0");
    if (cspr_db < 0.0) throw std::invalid_argument("kk: cspr_db must be >= 0");
    if (!(adc_rate_hz > 0.0)) throw std::invalid_argument("kk: adc_rate_hz must be > 0");
    if (internal_oversampling < 1.0)
        throw std::invalid_argument("kk: internal_oversampling must be >= 1");
    if (!(output_lowpass_hz > 0.0)) throw std::invalid_argument("kk: output_lowpass_hz must be > 0");
    if (pilot_samples < 256 || pilot_samples % 2 != 0)
        throw std::invalid_argument("kk: pilot_samples must be even and >= 256");
    if (!(bias_low_rel > 0.0) || !(bias_high_rel > bias_low_rel))
        throw std::invalid_argument("kk: bias search bounds must satisfy 0 < low < high");
    if (!(bias_tol_rel > 0.0)) throw std::invalid_argument("kk: bias_tol_rel must be > 0");
}

std::vector<double> photodetect(const ComplexFrame& x, const KkConfig& cfg, double* removed_dc) {
    cfg.validate();
    x.validate();
    if (x.channel_count() != 1)
        throw std::invalid_argument("photodetect: expects a single tributary");

    const std::vector<cplx>& e = x.channels[0];
    const double fs = x.sample_rate_hz;
    const double p_sig = x.channel_power(0);
    const double lo_amp = std::sqrt(undb10(cfg.cspr_db) * p_sig);

    // LO sits lo_offset below the signal carrier; the square-law output is
    // rotation-invariant so the tone is applied in frame baseband directly.
    std::vector<double> current(e.size());
    cplx rot(1.0, 0.0);
    const cplx inc = std::polar(1.0, -2.0 * M_PI * cfg.lo_offset_hz / fs);
    for (std::size_t n = 0; n < e.size(); ++n) {
        current[n] = std::norm(e[n] + lo_amp * rot);
        rot *= inc;
        if ((n & 0xfff) == 0xfff) rot /= std::abs(rot);
    }

    // Receiver analog bandwidth, then AC coupling.
    if (cfg.analog_bandwidth_hz > 0.0 && cfg.analog_bandwidth_hz < fs / 2.0) {
        std::vector<cplx> c(current.begin(), current.end());
        c = brickwall_lowpass(c, cfg.analog_bandwidth_hz, fs);
        for (std::size_t n = 0; n < current.size(); ++n) current[n] = c[n].real();
    }
    double mean = 0.0;
    for (double v : current) mean += v;
    mean /= static_cast<double>(current.size());
    for (double& v : current) v -= mean;
    if (removed_dc) *removed_dc = mean;
    return current;
}

std::vector<cplx> minimum_phase_field(const std::vector<double>& intensity) {
    std::size_t violations = 0;
    for (double v : intensity)
        if (!(v > 0.0)) ++violations;
    if (violations > 0)
        throw std::domain_error("kk: biased photocurrent not positive at " +
                                std::to_string(violations) + " samples");

    std::vector<double> half_log(intensity.size());
    for (std::size_t n = 0; n < intensity.size(); ++n) half_log[n] = 0.5 * std::log(intensity[n]);
    const std::vector<double> phase = hilbert_transform(half_log);

    std::vector<cplx> field(intensity.size());
    for (std::size_t n = 0; n < intensity.size(); ++n)
        field[n] = std::polar(std::sqrt(intensity[n]), phase[n]);
    return field;
}

ComplexFrame kk_reconstruct(const std::vector<double>& i_ac, double fs, const KkConfig& cfg,
                            double bias) {
    cfg.validate();
    if (i_ac.size() < 16) throw std::invalid_argument("kk_reconstruct: input too short");
    const double b = (bias >= 0.0) ? bias : cfg.dc_bias;

    std::size_t violations = 0;
    for (double v : i_ac)
        if (!(v + b > 0.0)) ++violations;
    if (violations > 0)
        throw std::domain_error("kk: biased photocurrent not positive at " +
                                std::to_string(violations) + " samples");

    // Upsample before the nonlinear steps; sqrt/log broaden the spectrum.
    const auto [p, q] = rational_rate_ratio(fs, fs * cfg.internal_oversampling, 1 << 12);
    std::vector<cplx> up(i_ac.begin(), i_ac.end());
    up = resample_channel(up, p, q);
    if (up.size() % 2 != 0) up.push_back(up.back());
    const double fs_up = fs * static_cast<double>(p) / q;

    std::vector<double> intensity(up.size());
    const double floor_val = 1e-9 * b;
    for (std::size_t n = 0; n < up.size(); ++n) {
        // Interpolation ringing may graze zero even when the sampled current
        // is positive; clamp at a negligible floor.
        intensity[n] = std::max(up[n].real() + b, floor_val);
    }

    std::vector<cplx> field = minimum_phase_field(intensity);

    cplx carrier = 0.0;
    for (const cplx& v : field) carrier += v;
    carrier /= static_cast<double>(field.size());
    for (cplx& v : field) v -= carrier;

    frequency_shift(field, -cfg.lo_offset_hz, fs_up);
    field = brickwall_lowpass(field, cfg.output_lowpass_hz, fs_up);
    field = resample_channel(field, q, p);
    field.resize(i_ac.size(), cplx(0.0, 0.0));

    ComplexFrame out(1, field.size(), fs);
    out.channels[0] = std::move(field);
    return out;
}

std::pair<double, int> golden_section_max(const std::function<double(double)>& f, double lo,
                                          double hi, double tol) {
    if (!(hi > lo)) throw std::invalid_argument("golden_section_max: bad bracket");
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, bnd = hi;
    double c = bnd - inv_phi * (bnd - a);
    double d = a + inv_phi * (bnd - a);
    double fc = f(c), fd = f(d);
    int evals = 2;
    while (bnd - a > tol) {
        if (fc > fd) {
            bnd = d;
            d = c;
            fd = fc;
            c = bnd - inv_phi * (bnd - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (bnd - a);
            fd = f(d);
        }
        ++evals;
        if (evals > 200) break;
    }
    return {0.5 * (a + bnd), evals};
}

BiasOptimum optimize_dc_bias(
    const std::vector<double>& i_ac, double fs, const KkConfig& cfg, double dc_guess,
    const std::function<double(double bias, const ComplexFrame& pilot_reconstruction)>& quality) {
    cfg.validate();
    if (!(dc_guess > 0.0)) throw std::invalid_argument("optimize_dc_bias: dc_guess must be > 0");

    double min_required = 0.0;
    for (double v : i_ac) min_required = std::max(min_required, -v);

    double lo = cfg.bias_low_rel * dc_guess;
    const double hi = cfg.bias_high_rel * dc_guess;
    if (hi <= min_required)
        throw std::runtime_error(
            "optimize_dc_bias: no positivity-restoring bias within bounds; needs > " +
            std::to_string(min_required) + ", upper bound " + std::to_string(hi));
    lo = std::max(lo, min_required * (1.0 + 1e-9) + 1e-12 * dc_guess);

    const std::size_t n = i_ac.size();
    const std::size_t pilot = std::min<std::size_t>(static_cast<std::size_t>(cfg.pilot_samples), n & ~std::size_t{1});
    const std::size_t start = (n - pilot) / 2;
    const std::vector<double> slice(i_ac.begin() + static_cast<std::ptrdiff_t>(start),
                                    i_ac.begin() + static_cast<std::ptrdiff_t>(start + pilot));

    int used = 0;
    const auto objective = [&](double bias) {
        ++used;
        const ComplexFrame rec = kk_reconstruct(slice, fs, cfg, bias);
        return quality(bias, rec);
    };
    const double best = golden_section_max(objective, lo, hi, cfg.bias_tol_rel * dc_guess).first;

    BiasOptimum out;
    out.bias = best;
    out.evaluations = used;
    out.quality = quality(best, kk_reconstruct(slice, fs, cfg, best));
    return out;
}

} // namespace mdmsim
