// SPDX-License-Identifier: Apache-2.0
#include "mdmsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mdmsim/dsp_util.hpp"
#include "mdmsim/fft.hpp"
#include "mdmsim/linalg.hpp"

namespace mdmsim {

namespace {
constexpr double kXtFloorDb = -60.0;

double log2_1p_exp(double t) {
    // log2(1 + exp(t)) without overflow.
    constexpr double kLn2 = 0.6931471805599453;
    if (t > 36.0) return t / kLn2;
    if (t < -36.0) return std::exp(t) / kLn2;
    return std::log1p(std::exp(t)) / kLn2;
}

cplx fit_gain(const std::vector<cplx>& rx, const std::vector<cplx>& ref, std::size_t n) {
    cplx num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += rx[i] * std::conj(ref[i]);
        den += std::norm(ref[i]);
    }
    if (!(den > 0.0)) throw std::invalid_argument("metrics: zero reference power");
    return num / den;
}

} // namespace

void FecModel::validate() const {
    if (!(code_rate > 0.0) || !(code_rate < 1.0))
        throw std::invalid_argument("fec: code_rate must be in (0, 1)");
    if (!(ngmi_threshold > 0.0) || !(ngmi_threshold <= 1.0))
        throw std::invalid_argument("fec: ngmi_threshold must be in (0, 1]");
}

double compute_gmi(const std::vector<cplx>& rx_symbols, const std::vector<std::uint8_t>& ref_bits,
                   const Constellation& c) {
    c.validate();
    const int m = c.bits_per_symbol;
    const std::size_t n = rx_symbols.size();
    if (n < 100) throw std::invalid_argument("compute_gmi: too few symbols");
    if (ref_bits.size() < n * static_cast<std::size_t>(m))
        throw std::invalid_argument("compute_gmi: reference bits shorter than the symbol stream");

    std::vector<cplx> ref_syms = map_symbols(
        std::vector<std::uint8_t>(ref_bits.begin(),
                                  ref_bits.begin() + static_cast<std::ptrdiff_t>(n * static_cast<std::size_t>(m))),
        c);

    // Alignment sanity: a stream that sits on the constellation (small blind
    // EVM) but disagrees with the reference bits is misaligned, not noisy.
    std::size_t bit_errors = 0;
    const cplx g0 = fit_gain(rx_symbols, ref_syms, n);
    double blind_power = 0.0;
    for (std::size_t s = 0; s < n; ++s) blind_power += std::norm(rx_symbols[s]);
    blind_power = std::sqrt(std::max(blind_power / static_cast<double>(n), 1e-300));
    double blind_err = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        const cplx z = rx_symbols[s] / blind_power;
        blind_err += std::norm(z - hard_decision(c, z));
        const cplx scaled = (std::abs(g0) > 1e-6 * blind_power) ? rx_symbols[s] / g0 : z;
        const std::uint32_t lab = c.bit_labels[hard_decision_index(c, scaled)];
        std::uint32_t ref_lab = 0;
        for (int b = 0; b < m; ++b)
            ref_lab = (ref_lab << 1) | (ref_bits[s * static_cast<std::size_t>(m) + static_cast<std::size_t>(b)] & 1u);
        const std::uint32_t diff = lab ^ ref_lab;
        bit_errors += static_cast<std::size_t>(__builtin_popcount(diff));
    }
    const double ber = static_cast<double>(bit_errors) / (static_cast<double>(n) * m);
    const double blind_evm = std::sqrt(blind_err / static_cast<double>(n));
    if (ber > 0.4 && blind_evm < 0.35)
        throw std::runtime_error("compute_gmi: stream misaligned (hard BER " + std::to_string(ber) + ")");

    // Gaussian channel law with data-estimated gain and noise variance.
    const cplx h = g0;
    double sigma2 = 0.0;
    for (std::size_t s = 0; s < n; ++s) sigma2 += std::norm(rx_symbols[s] - h * ref_syms[s]);
    sigma2 = std::max(sigma2 / static_cast<double>(n), 1e-300);

    const std::size_t npts = c.points.size();
    std::vector<double> d(npts);
    double bit_info_loss = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t i = 0; i < npts; ++i)
            d[i] = -std::norm(rx_symbols[s] - h * c.points[i]) / sigma2;
        for (int b = 0; b < m; ++b) {
            const std::uint32_t bitmask = 1u << (m - 1 - b);
            double max0 = -1e300, max1 = -1e300;
            for (std::size_t i = 0; i < npts; ++i) {
                if (c.bit_labels[i] & bitmask)
                    max1 = std::max(max1, d[i]);
                else
                    max0 = std::max(max0, d[i]);
            }
            double sum0 = 0.0, sum1 = 0.0;
            for (std::size_t i = 0; i < npts; ++i) {
                if (c.bit_labels[i] & bitmask)
                    sum1 += std::exp(d[i] - max1);
                else
                    sum0 += std::exp(d[i] - max0);
            }
            const double llr = (max0 + std::log(sum0)) - (max1 + std::log(sum1));
            const bool bit = ref_bits[s * static_cast<std::size_t>(m) + static_cast<std::size_t>(b)] & 1u;
            bit_info_loss += log2_1p_exp(bit ? llr : -llr);
        }
    }
    const double gmi = static_cast<double>(m) - bit_info_loss / static_cast<double>(n);
    return std::clamp(gmi, 0.0, static_cast<double>(m));
}

RateReport net_rate(const std::vector<double>& gmi_per_mode, double baud_hz, const FecModel& fec,
                    int n_streams, int bits_per_symbol) {
    fec.validate();
    if (n_streams < 1) throw std::invalid_argument("net_rate: n_streams must be >= 1");
    RateReport r;
    r.line_rate_gbps = static_cast<double>(n_streams) * baud_hz * bits_per_symbol / 1e9;
    double mean_gmi = 0.0;
    for (double g : gmi_per_mode) mean_gmi += g;
    mean_gmi = gmi_per_mode.empty() ? 0.0 : mean_gmi / static_cast<double>(gmi_per_mode.size());
    r.ngmi = mean_gmi / bits_per_symbol;
    if (r.ngmi >= fec.ngmi_threshold) {
        r.net_rate_gbps = r.line_rate_gbps * fec.code_rate;
        r.below_threshold = false;
    } else {
        r.net_rate_gbps = 0.0;
        r.below_threshold = true;
    }
    return r;
}

double compute_mdl(const std::vector<Eigen::MatrixXcd>& h_of_f) {
    if (h_of_f.empty()) throw std::invalid_argument("compute_mdl: no frequency points");
    const Eigen::Index cols = h_of_f.front().cols();
    if (h_of_f.front().rows() < cols)
        throw std::invalid_argument("compute_mdl: needs rows >= cols (outputs >= inputs)");

    std::vector<double> avg(static_cast<std::size_t>(cols), 0.0);
    for (const auto& h : h_of_f) {
        if (h.cols() != cols || h.rows() < cols)
            throw std::invalid_argument("compute_mdl: inconsistent matrix shapes");
        const Eigen::MatrixXcd gram = h.adjoint() * h;
        const std::vector<double> ev = hermitian_eigenvalues(gram); // ascending
        for (std::size_t i = 0; i < avg.size(); ++i) avg[i] += ev[i];
    }
    for (double& v : avg) v /= static_cast<double>(h_of_f.size());
    const double mx = avg.back();
    const double mn = avg.front();
    if (!(mn > 1e-12 * mx))
        throw std::runtime_error("compute_mdl: rank-deficient transfer matrix set");
    return db10(mx / mn);
}

double mdl_from_taps(const EqualizerState& taps, double band_fraction, int n_fft) {
    if (taps.n_out < 1 || taps.n_in < taps.n_out)
        throw std::invalid_argument("mdl_from_taps: needs n_in >= n_out converged taps");
    if (n_fft < taps.n_taps) n_fft = 1 << static_cast<int>(std::ceil(std::log2(taps.n_taps)) + 1);

    // W(f) per bin from the tap impulse responses (T/2 spacing: fs = 2 baud).
    std::vector<Eigen::MatrixXcd> w_of_f(static_cast<std::size_t>(n_fft),
                                         Eigen::MatrixXcd(taps.n_out, taps.n_in));
    std::vector<cplx> buf(static_cast<std::size_t>(n_fft));
    for (int o = 0; o < taps.n_out; ++o)
        for (int i = 0; i < taps.n_in; ++i) {
            std::fill(buf.begin(), buf.end(), cplx(0.0, 0.0));
            for (int l = 0; l < taps.n_taps; ++l) buf[static_cast<std::size_t>(l)] = taps.tap(o, i, l);
            fft_inplace(buf, false);
            for (int k = 0; k < n_fft; ++k)
                w_of_f[static_cast<std::size_t>(k)](o, i) = buf[static_cast<std::size_t>(k)];
        }

    std::vector<double> avg(static_cast<std::size_t>(taps.n_out), 0.0);
    std::size_t used = 0;
    for (int k = 0; k < n_fft; ++k) {
        const double f_baud = bin_frequency(static_cast<std::size_t>(k), static_cast<std::size_t>(n_fft), 2.0);
        if (std::abs(f_baud) > band_fraction) continue;
        const Eigen::MatrixXcd& w = w_of_f[static_cast<std::size_t>(k)];
        const Eigen::MatrixXcd gram = w * w.adjoint(); // n_out x n_out
        std::vector<double> ev = hermitian_eigenvalues(gram);
        if (!(ev.front() > 1e-14 * ev.back()))
            throw std::runtime_error("mdl_from_taps: tap response not invertible at bin " +
                                     std::to_string(k));
        // Equalizer ~ channel inverse: channel eigenvalues are 1/ev, and the
        // weakest channel direction comes from the largest tap eigenvalue.
        for (std::size_t i = 0; i < avg.size(); ++i) avg[i] += 1.0 / ev[ev.size() - 1 - i];
        ++used;
    }
    if (used == 0) throw std::invalid_argument("mdl_from_taps: empty averaging band");
    for (double& v : avg) v /= static_cast<double>(used);
    return db10(avg.back() / avg.front());
}

CrosstalkMatrices crosstalk_matrices(const EqualizerState& taps,
                                     const std::vector<int>& tx_mode_group,
                                     const std::vector<int>& rx_mode_group) {
    if (taps.n_out % 2 != 0 || taps.n_in % 2 != 0)
        throw std::invalid_argument("crosstalk: tap tensor must pair polarizations");
    const int n_tx = taps.n_out / 2;
    const int n_rx = taps.n_in / 2;
    if (static_cast<int>(tx_mode_group.size()) < n_tx || static_cast<int>(rx_mode_group.size()) < n_rx)
        throw std::invalid_argument("crosstalk: group maps shorter than the mode counts");

    // (sum_l |w|)^2 per stream pair, then polarization-averaged per mode pair.
    Eigen::MatrixXd spatial = Eigen::MatrixXd::Zero(n_rx, n_tx);
    for (int t = 0; t < n_tx; ++t)
        for (int r = 0; r < n_rx; ++r) {
            double acc = 0.0;
            for (int pt = 0; pt < 2; ++pt)
                for (int pr = 0; pr < 2; ++pr) {
                    double s = 0.0;
                    for (int l = 0; l < taps.n_taps; ++l)
                        s += std::abs(taps.tap(2 * t + pt, 2 * r + pr, l));
                    acc += s * s;
                }
            spatial(r, t) = acc / 4.0;
        }

    const int gt = *std::max_element(tx_mode_group.begin(), tx_mode_group.begin() + n_tx) + 1;
    const int gr = *std::max_element(rx_mode_group.begin(), rx_mode_group.begin() + n_rx) + 1;
    Eigen::MatrixXd group = Eigen::MatrixXd::Zero(gr, gt);
    Eigen::MatrixXd count = Eigen::MatrixXd::Zero(gr, gt);
    for (int t = 0; t < n_tx; ++t)
        for (int r = 0; r < n_rx; ++r) {
            group(rx_mode_group[static_cast<std::size_t>(r)], tx_mode_group[static_cast<std::size_t>(t)]) += spatial(r, t);
            count(rx_mode_group[static_cast<std::size_t>(r)], tx_mode_group[static_cast<std::size_t>(t)]) += 1.0;
        }
    for (int a = 0; a < gr; ++a)
        for (int b = 0; b < gt; ++b)
            if (count(a, b) > 0.0) group(a, b) /= count(a, b);

    const auto to_db = [](const Eigen::MatrixXd& lin) {
        const double mx = lin.maxCoeff();
        Eigen::MatrixXd out(lin.rows(), lin.cols());
        for (Eigen::Index r = 0; r < lin.rows(); ++r)
            for (Eigen::Index c = 0; c < lin.cols(); ++c) {
                const double rel = (mx > 0.0) ? lin(r, c) / mx : 0.0;
                out(r, c) = (rel > 1e-6) ? db10(rel) : kXtFloorDb;
            }
        return out;
    };

    CrosstalkMatrices xt;
    xt.spatial_db = to_db(spatial);
    xt.group_db = to_db(group);
    return xt;
}

namespace {

Eigen::MatrixXd average_db_matrices(const std::vector<const Eigen::MatrixXd*>& mats) {
    if (mats.empty() || mats.front()->size() == 0) return {};
    Eigen::MatrixXd lin = Eigen::MatrixXd::Zero(mats.front()->rows(), mats.front()->cols());
    for (const Eigen::MatrixXd* m : mats) {
        if (m->rows() != lin.rows() || m->cols() != lin.cols())
            throw std::invalid_argument("average_captures: crosstalk shapes differ");
        for (Eigen::Index r = 0; r < lin.rows(); ++r)
            for (Eigen::Index c = 0; c < lin.cols(); ++c) lin(r, c) += undb10((*m)(r, c));
    }
    lin /= static_cast<double>(mats.size());
    Eigen::MatrixXd out(lin.rows(), lin.cols());
    for (Eigen::Index r = 0; r < lin.rows(); ++r)
        for (Eigen::Index c = 0; c < lin.cols(); ++c)
            out(r, c) = std::max(kXtFloorDb, db10(lin(r, c)));
    return out;
}

} // namespace

MetricsReport average_captures(const std::vector<MetricsReport>& reports) {
    if (reports.empty()) throw std::invalid_argument("average_captures: empty input");
    const MetricsReport& first = reports.front();
    for (const auto& r : reports) {
        if (r.gmi_per_mode.size() != first.gmi_per_mode.size() ||
            r.gmi_per_stream.size() != first.gmi_per_stream.size() ||
            r.n_streams != first.n_streams || r.bits_per_symbol != first.bits_per_symbol ||
            r.baud_hz != first.baud_hz || r.fec.code_rate != first.fec.code_rate ||
            r.fec.ngmi_threshold != first.fec.ngmi_threshold)
            throw std::invalid_argument("average_captures: heterogeneous reports");
    }

    MetricsReport avg = first;
    avg.n_captures = 0;
    const auto mean_of = [&](auto field) {
        double acc = 0.0;
        for (const auto& r : reports) acc += field(r);
        return acc / static_cast<double>(reports.size());
    };

    for (std::size_t i = 0; i < first.gmi_per_mode.size(); ++i)
        avg.gmi_per_mode[i] = mean_of([&](const MetricsReport& r) { return r.gmi_per_mode[i]; });
    for (std::size_t i = 0; i < first.gmi_per_stream.size(); ++i) {
        avg.gmi_per_stream[i] = mean_of([&](const MetricsReport& r) { return r.gmi_per_stream[i]; });
        avg.evm_per_stream_pct[i] = mean_of([&](const MetricsReport& r) { return r.evm_per_stream_pct[i]; });
        avg.snr_per_stream_db[i] = mean_of([&](const MetricsReport& r) { return r.snr_per_stream_db[i]; });
    }
    avg.mdl_db = mean_of([](const MetricsReport& r) { return r.mdl_db; });
    avg.freq_offset_hz = mean_of([](const MetricsReport& r) { return r.freq_offset_hz; });
    avg.foe_confidence_db = mean_of([](const MetricsReport& r) { return r.foe_confidence_db; });

    std::vector<const Eigen::MatrixXd*> spat, grp;
    for (const auto& r : reports) {
        spat.push_back(&r.xt_spatial_db);
        grp.push_back(&r.xt_group_db);
    }
    avg.xt_spatial_db = average_db_matrices(spat);
    avg.xt_group_db = average_db_matrices(grp);

    const RateReport rr = net_rate(avg.gmi_per_mode, avg.baud_hz, avg.fec, avg.n_streams,
                                   avg.bits_per_symbol);
    avg.ngmi = rr.ngmi;
    avg.line_rate_gbps = rr.line_rate_gbps;
    avg.net_rate_gbps = rr.net_rate_gbps;
    avg.below_fec = rr.below_threshold;
    for (const auto& r : reports) avg.n_captures += r.n_captures;
    return avg;
}

double evm_percent(const std::vector<cplx>& rx, const std::vector<cplx>& ref) {
    const std::size_t n = std::min(rx.size(), ref.size());
    if (n == 0) throw std::invalid_argument("evm: empty input");
    const cplx h = fit_gain(rx, ref, n);
    double err = 0.0, sig = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        err += std::norm(rx[i] - h * ref[i]);
        sig += std::norm(h * ref[i]);
    }
    return 100.0 * std::sqrt(err / std::max(sig, 1e-300));
}

double estimate_snr_db(const std::vector<cplx>& rx, const std::vector<cplx>& ref) {
    const std::size_t n = std::min(rx.size(), ref.size());
    if (n == 0) throw std::invalid_argument("snr: empty input");
    const cplx h = fit_gain(rx, ref, n);
    double err = 0.0, sig = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        err += std::norm(rx[i] - h * ref[i]);
        sig += std::norm(h * ref[i]);
    }
    return db10(sig / std::max(err, 1e-300));
}

} // namespace mdmsim
