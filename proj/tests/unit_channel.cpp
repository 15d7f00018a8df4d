// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "mdmsim/channel.hpp"
#include "mdmsim/dsp_util.hpp"
#include "mdmsim/metrics.hpp"
#include "mdmsim/rng.hpp"
#include "test_helpers.hpp"

using namespace mdmsim;

namespace {

LinkConfig small_link() {
    LinkConfig cfg;
    cfg.n_sections = 20;
    cfg.mdl_grid_points = 65;
    cfg.seed = 11;
    return cfg;
}

ComplexFrame random_frame(std::size_t channels, std::size_t n, double fs, std::uint64_t seed) {
    ComplexFrame x(channels, n, fs);
    for (std::size_t c = 0; c < channels; ++c) {
        Rng rng(mix_seed({seed, c}));
        for (auto& v : x.channels[c]) v = rng.cnormal();
    }
    return x;
}

// Identity realization helper: one unit section, no delays, no dispersion.
ChannelRealization identity_channel(int dim) {
    ChannelRealization ch;
    ch.dim = dim;
    ch.n_groups = 1;
    ch.group_of_tributary.assign(static_cast<std::size_t>(dim), 0);
    ch.section_unitary.push_back(Eigen::MatrixXcd::Identity(dim, dim));
    ch.section_gain.push_back(Eigen::VectorXd::Ones(dim));
    ch.group_delay_s_per_section = {0.0};
    ch.cd_s2_per_section = 0.0;
    ch.section_length_km = 1.0;
    ch.grid_freq_hz = {0.0};
    ch.grid_response.push_back(Eigen::MatrixXcd::Identity(dim, dim));
    return ch;
}

} // namespace

TEST_CASE("synthesize_channel: zero target keeps every section unitary") {
    LinkConfig cfg = small_link();
    cfg.target_mdl_db = 0.0;
    const ChannelRealization ch = synthesize_channel(cfg);
    for (const auto& u : ch.section_unitary) {
        const Eigen::MatrixXcd gram = u.adjoint() * u;
        CHECK((gram - Eigen::MatrixXcd::Identity(ch.dim, ch.dim)).norm() < 1e-9);
    }
    for (const auto& g : ch.section_gain)
        for (int i = 0; i < ch.dim; ++i) CHECK(g(i) == doctest::Approx(1.0).epsilon(1e-12));
    for (const auto& h : ch.grid_response)
        CHECK((h.adjoint() * h - Eigen::MatrixXcd::Identity(ch.dim, ch.dim)).norm() < 1e-9);
    CHECK(compute_mdl(ch.grid_response) < 1e-9);
}

TEST_CASE("synthesize_channel: hits the MDL target within 0.1 dB") {
    for (double target : {3.0, 5.5, 11.0}) {
        LinkConfig cfg = small_link();
        cfg.target_mdl_db = target;
        cfg.seed = 77 + static_cast<std::uint64_t>(target * 10);
        const ChannelRealization ch = synthesize_channel(cfg);
        CHECK(std::abs(compute_mdl(ch.grid_response) - target) < 0.1);
    }
}

TEST_CASE("synthesize_channel: calibration holds across seeds and targets") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        for (double target : {0.0, 7.5, 15.0}) {
            LinkConfig cfg = small_link();
            cfg.n_sections = 12;
            cfg.target_mdl_db = target;
            cfg.seed = seed;
            const ChannelRealization ch = synthesize_channel(cfg);
            CHECK(std::abs(compute_mdl(ch.grid_response) - target) < 0.1);
        }
    }
}

TEST_CASE("synthesize_channel: single flat section is frequency-constant") {
    LinkConfig cfg = small_link();
    cfg.n_sections = 1;
    cfg.target_mdl_db = 4.0;
    cfg.dmgd_ps_per_km = {0.0, 0.0, 0.0};
    cfg.cd_ps2_per_km = 0.0;
    const ChannelRealization ch = synthesize_channel(cfg);
    for (const auto& h : ch.grid_response) CHECK((h - ch.grid_response.front()).norm() < 1e-12);
}

TEST_CASE("synthesize_channel: unreachable target names the achieved value") {
    LinkConfig cfg = small_link();
    cfg.n_sections = 1;
    cfg.target_mdl_db = 39.0;
    try {
        (void)synthesize_channel(cfg);
        FAIL("expected a calibration failure");
    } catch (const std::runtime_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("achieved") != std::string::npos);
    }
}

TEST_CASE("synthesize_channel: deterministic in (cfg, seed)") {
    LinkConfig cfg = small_link();
    cfg.target_mdl_db = 6.0;
    const ChannelRealization a = synthesize_channel(cfg);
    const ChannelRealization b = synthesize_channel(cfg);
    REQUIRE(a.section_unitary.size() == b.section_unitary.size());
    for (std::size_t s = 0; s < a.section_unitary.size(); ++s) {
        CHECK((a.section_unitary[s] - b.section_unitary[s]).norm() == 0.0);
        CHECK((a.section_gain[s] - b.section_gain[s]).norm() == 0.0);
    }
}

TEST_CASE("apply_channel: identity returns the zero-padded input") {
    const ChannelRealization ch = identity_channel(12);
    const ComplexFrame x = random_frame(6, 4096, 99.99e9, 5);
    const ComplexFrame y = apply_channel(x, ch, 3);
    REQUIRE(y.channel_count() == 12);
    for (std::size_t c = 0; c < 6; ++c)
        for (std::size_t i = 0; i < x.length(); ++i)
            CHECK(std::abs(y.channels[c][i] - x.channels[c][i]) < 1e-12);
    for (std::size_t c = 6; c < 12; ++c)
        for (std::size_t i = 0; i < x.length(); ++i) CHECK(std::abs(y.channels[c][i]) < 1e-12);
}

TEST_CASE("apply_channel: rejects dimension mismatches") {
    const ChannelRealization ch = identity_channel(12);
    const ComplexFrame x = random_frame(6, 256, 99.99e9, 5);
    CHECK_THROWS_AS(apply_channel(x, ch, 1), std::invalid_argument);
}

TEST_CASE("apply_channel: inter-group coupling lights up group 3 from a 3-mode launch") {
    LinkConfig cfg = small_link();
    cfg.target_mdl_db = 0.0;
    const ChannelRealization ch = synthesize_channel(cfg);
    const ComplexFrame x = random_frame(6, 4096, 99.99e9, 9);
    const ComplexFrame y = apply_channel(x, ch, 3);
    double group3 = 0.0;
    for (std::size_t c = 6; c < 12; ++c) group3 += y.channel_power(c);
    CHECK(group3 / y.total_power() > 0.05);
}

TEST_CASE("apply_channel: unitary channel conserves energy; linear in the input") {
    LinkConfig cfg = small_link();
    cfg.target_mdl_db = 0.0;
    const ChannelRealization ch = synthesize_channel(cfg);

    const ComplexFrame x = random_frame(12, 2048, 99.99e9, 13);
    const ComplexFrame y = apply_channel(x, ch, 0);
    CHECK(y.total_power() == doctest::Approx(x.total_power()).epsilon(1e-9));

    const ComplexFrame x2 = random_frame(12, 2048, 99.99e9, 17);
    ComplexFrame combo = x;
    for (std::size_t c = 0; c < 12; ++c)
        for (std::size_t i = 0; i < combo.length(); ++i)
            combo.channels[c][i] = 0.7 * x.channels[c][i] + cplx(0, 2.0) * x2.channels[c][i];
    const ComplexFrame y2 = apply_channel(x2, ch, 0);
    const ComplexFrame yc = apply_channel(combo, ch, 0);
    double err = 0.0, ref = 0.0;
    for (std::size_t c = 0; c < 12; ++c)
        for (std::size_t i = 0; i < yc.length(); ++i) {
            err += std::norm(yc.channels[c][i] - (0.7 * y.channels[c][i] + cplx(0, 2.0) * y2.channels[c][i]));
            ref += std::norm(yc.channels[c][i]);
        }
    CHECK(std::sqrt(err / ref) < 1e-10);
}

TEST_CASE("apply_channel: disabled inter-group coupling keeps groups sealed") {
    LinkConfig cfg = small_link();
    cfg.inter_group_xt_db = -1000.0;
    cfg.target_mdl_db = 0.0;
    const ChannelRealization ch = synthesize_channel(cfg);

    // Power launched into group 1 only (LP01 pair); group-averaged leakage
    // into groups 2 and 3 must sit at the numerical floor.
    ComplexFrame x(12, 2048, 99.99e9);
    Rng rng(23);
    for (auto& v : x.channels[0]) v = rng.cnormal();
    for (auto& v : x.channels[1]) v = rng.cnormal();
    const ComplexFrame y = apply_channel(x, ch, 0);
    double leak = 0.0;
    for (std::size_t c = 2; c < 12; ++c) leak += y.channel_power(c);
    CHECK(db10(leak / y.total_power()) < -40.0);
}

TEST_CASE("channel: serialization round trip") {
    LinkConfig cfg = small_link();
    cfg.n_sections = 4;
    cfg.mdl_grid_points = 9;
    cfg.target_mdl_db = 5.0;
    const ChannelRealization ch = synthesize_channel(cfg);
    const std::string path = (std::filesystem::temp_directory_path() / "mdmsim_chan_test.txt").string();
    save_channel(ch, path);
    const ChannelRealization back = load_channel(path);
    REQUIRE(back.dim == ch.dim);
    REQUIRE(back.section_unitary.size() == ch.section_unitary.size());
    for (std::size_t s = 0; s < ch.section_unitary.size(); ++s) {
        CHECK((back.section_unitary[s] - ch.section_unitary[s]).norm() == 0.0);
        CHECK((back.section_gain[s] - ch.section_gain[s]).norm() == 0.0);
    }
    for (std::size_t k = 0; k < ch.grid_response.size(); ++k)
        CHECK((back.grid_response[k] - ch.grid_response[k]).norm() == 0.0);
    std::filesystem::remove(path);
}

TEST_CASE("add_noise: SNR follows launch power dB-for-dB with the ceiling off") {
    LinkConfig cfg = small_link();
    cfg.snr_ceiling_enabled = false;
    const ComplexFrame x = random_frame(4, 200000, 80e9, 31);

    const auto measured_snr = [&](double power) {
        const ComplexFrame y = add_noise(x, power, cfg, 555);
        double sig = 0.0, noise = 0.0;
        for (std::size_t c = 0; c < x.channel_count(); ++c)
            for (std::size_t i = 0; i < x.length(); ++i) {
                sig += std::norm(x.channels[c][i]);
                noise += std::norm(y.channels[c][i] - x.channels[c][i]);
            }
        return db10(sig / noise);
    };
    const double s0 = measured_snr(0.0);
    const double s10 = measured_snr(10.0);
    CHECK(s10 - s0 == doctest::Approx(10.0).epsilon(0.1 / 10.0));
    CHECK(s0 == doctest::Approx(model_snr_db(0.0, cfg)).epsilon(0.05));
}

TEST_CASE("add_noise: ceiling caps the SNR at any launch power") {
    LinkConfig cfg = small_link();
    cfg.snr_ceiling_enabled = true;
    cfg.snr_ceiling_db = 20.0;
    const ComplexFrame x = random_frame(2, 100000, 80e9, 37);
    for (double power : {0.0, 10.0, 20.0, 40.0}) {
        const ComplexFrame y = add_noise(x, power, cfg, 777);
        double sig = 0.0, noise = 0.0;
        for (std::size_t c = 0; c < x.channel_count(); ++c)
            for (std::size_t i = 0; i < x.length(); ++i) {
                sig += std::norm(x.channels[c][i]);
                noise += std::norm(y.channels[c][i] - x.channels[c][i]);
            }
        CHECK(db10(sig / noise) < 20.0);
    }
    // The ceiling makes the effective SNR bend down past the reference power.
    CHECK(model_snr_db(40.0, cfg) < model_snr_db(12.0, cfg));
}

TEST_CASE("add_noise: deterministic per seed, independent across seeds") {
    LinkConfig cfg = small_link();
    const ComplexFrame x = random_frame(2, 4096, 80e9, 41);
    const ComplexFrame a = add_noise(x, 0.0, cfg, 1001);
    const ComplexFrame b = add_noise(x, 0.0, cfg, 1001);
    const ComplexFrame c = add_noise(x, 0.0, cfg, 1002);
    CHECK(a.channels == b.channels);
    CHECK(a.channels != c.channels);
}

TEST_CASE("model GMI curve shape: rise then saturate across the sweep") {
    // AWGN-only probe of the noise model against the GMI estimator: the curve
    // must rise about 1 bit per 3 dB in the linear regime and flatten at the
    // ceiling.
    LinkConfig cfg = small_link();
    const Constellation c = make_8qam_circular();
    std::vector<double> gmi;
    int idx = 0;
    for (double p = -10.0; p <= 15.0; p += 2.5) {
        const double snr_db = model_snr_db(p, cfg);
        const auto s = testkit::make_awgn_stream(c, snr_db, 60000, static_cast<std::uint32_t>(50 + idx++));
        gmi.push_back(compute_gmi(s.rx, s.bits, c));
    }
    const std::size_t peak = static_cast<std::size_t>(
        std::max_element(gmi.begin(), gmi.end()) - gmi.begin());
    for (std::size_t i = 1; i <= peak; ++i) CHECK(gmi[i] >= gmi[i - 1] - 0.02);
    CHECK(gmi.front() < 2.0);
    CHECK(gmi[peak] > 2.9);
    // Saturation with at most the modeled high-power penalty past the peak.
    for (std::size_t i = peak; i < gmi.size(); ++i) CHECK(gmi[peak] - gmi[i] < 0.1);
}
