// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mdmsim/linalg.hpp"
#include "mdmsim/metrics.hpp"
#include "mdmsim/rng.hpp"
#include "test_helpers.hpp"

using namespace mdmsim;

TEST_CASE("compute_gmi: noiseless stream saturates at m") {
    const Constellation c = make_8qam_circular();
    const auto s = testkit::make_awgn_stream(c, 60.0, 20000, 1);
    const double gmi = compute_gmi(s.rx, s.bits, c);
    CHECK(gmi == doctest::Approx(3.0).epsilon(1e-3 / 3.0));
}

TEST_CASE("compute_gmi: matches the quadrature oracle on AWGN") {
    const Constellation c = make_8qam_circular();
    // Full-scale check at one SNR; the acceptance suite sweeps five points.
    const double snr_db = 10.0;
    const auto s = testkit::make_awgn_stream(c, snr_db, 241000, 7);
    const double mc = compute_gmi(s.rx, s.bits, c);
    const double oracle = testkit::gmi_awgn_quadrature(c, snr_db);
    CHECK(std::abs(mc - oracle) < 0.01);
}

TEST_CASE("compute_gmi: pure noise carries nothing") {
    const Constellation c = make_8qam_circular();
    std::mt19937 gen(3);
    std::normal_distribution<double> g;
    std::vector<cplx> rx(30000);
    for (auto& v : rx) v = cplx(g(gen), g(gen));
    std::vector<std::uint8_t> bits(rx.size() * 3);
    std::uniform_int_distribution<int> bit(0, 1);
    for (auto& b : bits) b = static_cast<std::uint8_t>(bit(gen));
    const double gmi = compute_gmi(rx, bits, c);
    CHECK(gmi <= 0.05);
}

TEST_CASE("compute_gmi: monotone in SNR") {
    const Constellation c = make_8qam_circular();
    double prev = -1.0;
    int snr_index = 0;
    for (double snr_db = 0.0; snr_db <= 19.0; snr_db += 1.0) {
        const auto s = testkit::make_awgn_stream(c, snr_db, 50000,
                                                 static_cast<std::uint32_t>(100 + snr_index));
        const double gmi = compute_gmi(s.rx, s.bits, c);
        CHECK(gmi >= prev - 0.005);
        prev = gmi;
        ++snr_index;
    }
}

TEST_CASE("compute_gmi: misalignment raises an error") {
    const Constellation c = make_8qam_circular();
    auto s = testkit::make_awgn_stream(c, 20.0, 5000, 11);
    // Shift the symbols against the bits to break alignment.
    std::rotate(s.rx.begin(), s.rx.begin() + 1777, s.rx.end());
    CHECK_THROWS(compute_gmi(s.rx, s.bits, c));
}

TEST_CASE("net_rate: reference arithmetic") {
    const FecModel fec;
    const std::vector<double> gmi6(6, 2.95);
    const RateReport r12 = net_rate(gmi6, 33.33e9, fec, 12, 3);
    CHECK(r12.line_rate_gbps == doctest::Approx(1199.88).epsilon(1e-9));
    CHECK(r12.net_rate_gbps == doctest::Approx(1199.88 * 0.8402).epsilon(1e-9));
    CHECK_FALSE(r12.below_threshold);

    const std::vector<double> gmi3(3, 2.95);
    const RateReport r6 = net_rate(gmi3, 33.33e9, fec, 6, 3);
    CHECK(r6.line_rate_gbps == doctest::Approx(599.94).epsilon(1e-9));
    CHECK(r6.net_rate_gbps == doctest::Approx(599.94 * 0.8402).epsilon(1e-9));

    const std::vector<double> low(6, 2.0);
    const RateReport rb = net_rate(low, 33.33e9, fec, 12, 3);
    CHECK(rb.below_threshold);
    CHECK(rb.net_rate_gbps == 0.0);
}

TEST_CASE("compute_mdl: identity and flat diagonal") {
    std::vector<Eigen::MatrixXcd> h1{Eigen::MatrixXcd::Identity(4, 4)};
    CHECK(compute_mdl(h1) == doctest::Approx(0.0).epsilon(1e-12));

    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = 1.0;
    std::vector<Eigen::MatrixXcd> h2(5, d); // frequency-flat
    CHECK(compute_mdl(h2) == doctest::Approx(10.0 * std::log10(4.0)).epsilon(1e-9));
}

TEST_CASE("compute_mdl: matches the real-embedding oracle on a random set") {
    Rng rng(99);
    std::vector<Eigen::MatrixXcd> h;
    for (int k = 0; k < 512; ++k) {
        Eigen::MatrixXcd m = haar_unitary(12, rng);
        // Mildly non-unitary, frequency-dependent.
        for (int i = 0; i < 12; ++i) m.col(i) *= 1.0 + 0.3 * std::sin(0.05 * k + i);
        h.push_back(m);
    }
    const double got = compute_mdl(h);

    // Oracle: dense eigendecomposition per grid point through the 2n x 2n real
    // symmetric embedding, explicit averaging.
    std::vector<double> avg(12, 0.0);
    for (const auto& m : h) {
        const Eigen::MatrixXcd gram = m.adjoint() * m;
        std::vector<std::vector<cplx>> g(12, std::vector<cplx>(12));
        for (int r = 0; r < 12; ++r)
            for (int c = 0; c < 12; ++c) g[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = gram(r, c);
        const auto ev = testkit::hermitian_eigenvalues_embedding(g);
        for (int i = 0; i < 12; ++i) avg[static_cast<std::size_t>(i)] += ev[static_cast<std::size_t>(i)];
    }
    for (double& v : avg) v /= static_cast<double>(h.size());
    const double oracle = 10.0 * std::log10(avg.back() / avg.front());
    CHECK(std::abs(got - oracle) < 1e-9);
}

TEST_CASE("compute_mdl: invariances and the zero case") {
    Rng rng(7);
    std::vector<Eigen::MatrixXcd> h;
    for (int k = 0; k < 32; ++k) {
        Eigen::MatrixXcd m = haar_unitary(6, rng);
        for (int i = 0; i < 6; ++i) m.col(i) *= 1.0 + 0.2 * std::cos(0.3 * k * (i + 1));
        h.push_back(m);
    }
    const double base = compute_mdl(h);

    std::vector<Eigen::MatrixXcd> scaled, rotated;
    const Eigen::MatrixXcd ul = haar_unitary(6, rng);
    const Eigen::MatrixXcd ur = haar_unitary(6, rng);
    for (const auto& m : h) {
        scaled.push_back(3.7 * m);
        rotated.push_back(ul * m * ur);
    }
    CHECK(compute_mdl(scaled) == doctest::Approx(base).epsilon(1e-10));
    CHECK(compute_mdl(rotated) == doctest::Approx(base).epsilon(1e-10));

    // Unitary-times-scalar set averages to equal eigenvalues.
    std::vector<Eigen::MatrixXcd> uni;
    for (int k = 0; k < 16; ++k) uni.push_back(std::polar(2.0, 0.3 * k) * haar_unitary(6, rng));
    CHECK(compute_mdl(uni) < 1e-9);

    std::vector<Eigen::MatrixXcd> deficient{Eigen::MatrixXcd::Zero(3, 3)};
    deficient[0](0, 0) = 1.0;
    CHECK_THROWS(compute_mdl(deficient));
}

TEST_CASE("mdl_from_taps: identity center tap and exact flat inverse") {
    EqualizerState ident(4, 4, 7);
    for (int i = 0; i < 4; ++i) ident.tap(i, i, 3) = 1.0;
    CHECK(mdl_from_taps(ident) == doctest::Approx(0.0).epsilon(1e-9));

    // Frequency-flat channel with a known eigenvalue spread; center-tap-only
    // taps equal to its inverse must report the channel MDL.
    Rng rng(21);
    const Eigen::MatrixXcd u = haar_unitary(6, rng);
    const Eigen::MatrixXcd v = haar_unitary(6, rng);
    Eigen::VectorXd sv(6);
    const double spread_db = 5.5;
    for (int i = 0; i < 6; ++i)
        sv(i) = std::pow(10.0, (spread_db / 2.0) * (i / 5.0 - 0.5) / 10.0);
    const Eigen::MatrixXcd h0 = u * sv.cast<cplx>().asDiagonal() * v.adjoint();
    const Eigen::MatrixXcd w0 = h0.inverse();

    EqualizerState zf(6, 6, 5);
    for (int o = 0; o < 6; ++o)
        for (int i = 0; i < 6; ++i) zf.tap(o, i, 2) = w0(o, i);
    const double expect = 10.0 * std::log10(std::pow(sv(5) / sv(0), 2.0));
    CHECK(expect == doctest::Approx(5.5).epsilon(1e-9));
    CHECK(mdl_from_taps(zf) == doctest::Approx(expect).epsilon(0.2 / 5.5));

    EqualizerState singular(2, 2, 3);
    singular.tap(0, 0, 1) = 1.0; // second output row all zero
    CHECK_THROWS(mdl_from_taps(singular));
}

TEST_CASE("crosstalk_matrices: identity and block-diagonal taps") {
    EqualizerState ident(12, 12, 5);
    for (int i = 0; i < 12; ++i) ident.tap(i, i, 2) = 1.0;
    const std::vector<int> groups{0, 1, 1, 2, 2, 2};
    const CrosstalkMatrices xt = crosstalk_matrices(ident, groups, groups);
    REQUIRE(xt.spatial_db.rows() == 6);
    REQUIRE(xt.spatial_db.cols() == 6);
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c) {
            if (r == c)
                CHECK(xt.spatial_db(r, c) == doctest::Approx(0.0).epsilon(1e-12));
            else
                CHECK(xt.spatial_db(r, c) == doctest::Approx(-60.0).epsilon(1e-12));
        }

    // Fill each group block densely; the group matrix must be diagonal.
    EqualizerState block(12, 12, 5);
    for (int ga = 0; ga < 3; ++ga) {
        const int lo = ga == 0 ? 0 : (ga == 1 ? 2 : 6);
        const int hi = ga == 0 ? 2 : (ga == 1 ? 6 : 12);
        for (int o = lo; o < hi; ++o)
            for (int i = lo; i < hi; ++i) block.tap(o, i, 2) = 0.5;
    }
    const CrosstalkMatrices xb = crosstalk_matrices(block, groups, groups);
    REQUIRE(xb.group_db.rows() == 3);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            if (r == c)
                CHECK(xb.group_db(r, c) == doctest::Approx(0.0).epsilon(1e-12));
            else
                CHECK(xb.group_db(r, c) == doctest::Approx(-60.0).epsilon(1e-12));
        }
}

TEST_CASE("crosstalk_matrices: polarization-rotation-only taps stay diagonal") {
    EqualizerState rot(12, 12, 3);
    Rng rng(5);
    for (int mode = 0; mode < 6; ++mode) {
        const double th = rng.uniform() * 2.0 * M_PI;
        const cplx ph = std::polar(1.0, rng.uniform() * 2.0 * M_PI);
        rot.tap(2 * mode, 2 * mode, 1) = std::cos(th);
        rot.tap(2 * mode, 2 * mode + 1, 1) = -std::sin(th) * ph;
        rot.tap(2 * mode + 1, 2 * mode, 1) = std::sin(th) * std::conj(ph);
        rot.tap(2 * mode + 1, 2 * mode + 1, 1) = std::cos(th);
    }
    const std::vector<int> groups{0, 1, 1, 2, 2, 2};
    const CrosstalkMatrices xt = crosstalk_matrices(rot, groups, groups);
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c)
            if (r != c) CHECK(xt.spatial_db(r, c) < -30.0);
}

TEST_CASE("average_captures: identity, mean, heterogeneity") {
    MetricsReport a;
    a.mode_names = {"LP01"};
    a.gmi_per_mode = {2.0};
    a.gmi_per_stream = {2.0, 2.0};
    a.evm_per_stream_pct = {10.0, 12.0};
    a.snr_per_stream_db = {15.0, 14.0};
    a.baud_hz = 33.33e9;
    a.n_streams = 2;
    a.mdl_db = 3.0;
    a.xt_spatial_db = Eigen::MatrixXd::Zero(1, 1);
    a.xt_group_db = Eigen::MatrixXd::Zero(1, 1);
    const RateReport ra = net_rate(a.gmi_per_mode, a.baud_hz, a.fec, 2, 3);
    a.ngmi = ra.ngmi;
    a.line_rate_gbps = ra.line_rate_gbps;
    a.net_rate_gbps = ra.net_rate_gbps;
    a.below_fec = ra.below_threshold;

    const MetricsReport same = average_captures({a, a, a});
    CHECK(same.gmi_per_mode[0] == doctest::Approx(2.0));
    CHECK(same.mdl_db == doctest::Approx(3.0));
    CHECK(same.n_captures == 3);

    MetricsReport b = a;
    b.gmi_per_mode = {3.0};
    b.gmi_per_stream = {3.0, 3.0};
    const MetricsReport avg = average_captures({a, b});
    CHECK(avg.gmi_per_mode[0] == doctest::Approx(2.5));

    MetricsReport c = a;
    c.n_streams = 4;
    c.gmi_per_stream = {1, 1, 1, 1};
    c.evm_per_stream_pct = {1, 1, 1, 1};
    c.snr_per_stream_db = {1, 1, 1, 1};
    CHECK_THROWS_AS((void)average_captures({a, c}), std::invalid_argument);
}

TEST_CASE("average_captures: five-capture spread is small") {
    const Constellation c = make_8qam_circular();
    std::vector<MetricsReport> reports;
    for (int cap = 0; cap < 5; ++cap) {
        const auto s = testkit::make_awgn_stream(c, 12.0, 48200,
                                                 static_cast<std::uint32_t>(900 + cap));
        MetricsReport r;
        r.mode_names = {"LP01"};
        r.gmi_per_mode = {compute_gmi(s.rx, s.bits, c)};
        r.gmi_per_stream = r.gmi_per_mode;
        r.evm_per_stream_pct = {0.0};
        r.snr_per_stream_db = {12.0};
        r.baud_hz = 33.33e9;
        r.n_streams = 1;
        r.xt_spatial_db = Eigen::MatrixXd::Zero(1, 1);
        r.xt_group_db = Eigen::MatrixXd::Zero(1, 1);
        reports.push_back(std::move(r));
    }
    double mean = 0.0, var = 0.0;
    for (const auto& r : reports) mean += r.gmi_per_mode[0];
    mean /= 5.0;
    for (const auto& r : reports) var += std::pow(r.gmi_per_mode[0] - mean, 2.0);
    const double std_err = std::sqrt(var / 5.0 / 4.0);
    CHECK(std_err < 0.01);
    const MetricsReport avg = average_captures(reports);
    CHECK(avg.gmi_per_mode[0] == doctest::Approx(mean).epsilon(1e-12));
}
