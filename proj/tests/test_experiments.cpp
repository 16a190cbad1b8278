#include "otfsaf/experiments.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <random>

using namespace otfsaf;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const AxisDensity kCoarse{4, 4, 4.0};

}  // namespace

TEST_CASE("RunningStats matches a two-pass computation") {
    std::mt19937_64 gen(42);
    std::normal_distribution<double> dist(1e6, 3.0);
    std::vector<double> xs(1000);
    for (auto& x : xs) x = dist(gen);

    RunningStats rs;
    for (double x : xs) rs.push(x);
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= xs.size();
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double var = ss / (xs.size() - 1);

    CHECK(rs.count == 1000);
    CHECK_THAT(rs.mean, WithinRel(mean, 1e-14));
    CHECK_THAT(rs.variance(), WithinRel(var, 1e-10));
    CHECK_THAT(rs.standard_error(), WithinRel(std::sqrt(var / 1000.0), 1e-10));

    RunningStats one;
    one.push(5.0);
    CHECK(one.variance() == 0.0);
    CHECK(RunningStats{}.standard_error() == 0.0);
}

TEST_CASE("ExperimentConfig validation") {
    CHECK_NOTHROW(ExperimentConfig::make(2, 2, 4, 1, 0, kCoarse).validate());
    CHECK_THROWS_AS(ExperimentConfig::make(2, 2, 12, 1, 0, kCoarse).validate(), InvalidOrder);
    CHECK_THROWS_AS(ExperimentConfig::make(2, 2, 4, 0, 0, kCoarse).validate(), std::invalid_argument);
    CHECK_THROWS(ExperimentConfig::make(0, 2, 4, 1, 0, kCoarse));

    ExperimentConfig narrow = ExperimentConfig::make(2, 2, 4, 1, 0, kCoarse);
    narrow.axes.fd_values = {-0.5, 0.0, 0.5};
    CHECK_THROWS_AS(narrow.validate(), std::invalid_argument);
}

TEST_CASE("Monte Carlo moments: single realization and origin") {
    ExperimentConfig ec = ExperimentConfig::make(2, 4, 4, 1, 7, kCoarse);
    const McMomentEstimate one = run_mc_moments(ec);
    for (double v : one.var_mag) CHECK(v == 0.0);
    for (std::size_t i = 0; i < one.mean_mag.size(); ++i) {
        CHECK_THAT(one.mean_sq_mag.data()[i], WithinRel(one.mean_mag.data()[i] * one.mean_mag.data()[i], 1e-12));
    }

    // constant-modulus symbols: |A(0, 0)| = NM in every realization
    ec.realizations = 50;
    const McMomentEstimate est = run_mc_moments(ec);
    const auto i0 = *find_axis_index(est.axes.tau_values, 0.0, 1e-12);
    const auto j0 = *find_axis_index(est.axes.fd_values, 0.0, 1e-12);
    CHECK_THAT(est.mean_mag(i0, j0), WithinRel(ec.cfg.nm(), 1e-12));
    CHECK_THAT(est.var_mag(i0, j0), WithinAbs(0.0, 1e-12));
    CHECK(est.realizations == 50);
}

TEST_CASE("Monte Carlo mean of A approaches the closed form") {
    ExperimentConfig ec = ExperimentConfig::make(4, 8, 4, 1000, 2024, AxisDensity{8, 8, 10.0});
    const McMomentEstimate est = run_mc_moments(ec);
    RealMatrix exact(est.axes.tau_values.size(), est.axes.fd_values.size());
    RealMatrix simulated(exact.rows(), exact.cols());
    for (std::size_t i = 0; i < exact.rows(); ++i) {
        for (std::size_t j = 0; j < exact.cols(); ++j) {
            exact(i, j) = mean_abs_complex_af(ec.cfg, {est.axes.tau_values[i], est.axes.fd_values[j]});
            simulated(i, j) = std::abs(est.mean_complex(i, j));
        }
    }
    // only points where the mean is well above its own noise floor
    CHECK(avg_relative_error(exact, simulated, 0.05 * ec.cfg.nm()) <= 0.03);
}

TEST_CASE("avg_relative_error") {
    RealMatrix ref(1, 3), est(1, 3);
    ref(0, 0) = 1.0;
    ref(0, 1) = 2.0;
    ref(0, 2) = 1e-9;
    est = ref;
    CHECK(avg_relative_error(ref, est) == 0.0);

    est(0, 0) = 1.1;
    est(0, 1) = 1.8;
    est(0, 2) = 5.0;  // below the default 1e-3 * peak threshold, ignored
    CHECK_THAT(avg_relative_error(ref, est), WithinAbs(0.1, 1e-12));
    CHECK_THAT(avg_relative_error(ref, est, 1.5), WithinAbs(0.1, 1e-12));

    CHECK_THROWS_AS(avg_relative_error(ref, est, 10.0), EmptyMask);
    CHECK_THROWS_AS(avg_relative_error(RealMatrix(1, 3), RealMatrix(1, 3)), EmptyMask);
    CHECK_THROWS_AS(avg_relative_error(ref, RealMatrix(3, 1)), DimensionMismatch);
}

TEST_CASE("results do not depend on thread count") {
    ExperimentConfig ec = ExperimentConfig::make(2, 4, 16, 40, 99, kCoarse);
    ec.threads = 1;
    const McMomentEstimate a = run_mc_moments(ec);
    const auto sa = sidelobe_distribution(ec);
    ec.threads = 3;
    const McMomentEstimate b = run_mc_moments(ec);
    const auto sb = sidelobe_distribution(ec);

    CHECK(a.mean_mag == b.mean_mag);
    CHECK(a.var_mag == b.var_mag);
    CHECK(a.mean_complex == b.mean_complex);
    REQUIRE(sa.size() == sb.size());
    for (std::size_t r = 0; r < sa.size(); ++r) {
        CHECK(sa[r].pslr_db == sb[r].pslr_db);
        CHECK(sa[r].islr_db == sb[r].islr_db);
    }
}

TEST_CASE("sidelobe_distribution") {
    const ExperimentConfig ec = ExperimentConfig::make(4, 4, 4, 12, 5, AxisDensity{8, 8, 10.0});
    const auto s = sidelobe_distribution(ec);
    REQUIRE(s.size() == 12);
    const auto again = sidelobe_distribution(ec);
    for (std::size_t r = 0; r < s.size(); ++r) {
        CHECK(s[r].pslr_db == again[r].pslr_db);
        CHECK(s[r].pslr_db <= 0.0);
        CHECK(std::isfinite(s[r].islr_db));
    }

    // realization r is reproducible on its own
    const Constellation c = make_qam(4);
    const TfSymbolGrid frame = dd_to_tf(realization_symbols(c, ec.cfg, ec.seed, 7), ec.cfg);
    const AfGrid g = AfEvaluator(ec.cfg, ec.axes).evaluate(frame, 1);
    CHECK(sidelobe_report(g, ec.region).pslr_db == s[7].pslr_db);
}

TEST_CASE("compare_otfs_ofdm pairs the waveforms on shared symbols") {
    std::map<std::size_t, std::size_t> draws;
    CompareOptions opt;
    opt.density = AxisDensity{4, 4, 6.0};
    opt.on_draw = [&](std::size_t m, std::size_t) { ++draws[m]; };
    const auto rows = compare_otfs_ofdm(2, {2, 4}, 6, 11, opt);

    REQUIRE(rows.size() == 4);
    CHECK(rows[0].waveform == WaveformKind::Otfs);
    CHECK(rows[1].waveform == WaveformKind::Ofdm);
    CHECK(rows[0].m == 2);
    CHECK(rows[1].m == 2);
    CHECK(rows[2].m == 4);
    CHECK(rows[3].waveform == WaveformKind::Ofdm);
    // one draw per realization, shared by both waveforms
    CHECK(draws[2] == 6);
    CHECK(draws[4] == 6);

    // the OFDM row equals a standalone OFDM run on the same seed
    ExperimentConfig ec = ExperimentConfig::make(2, 4, 4, 6, 11, opt.density);
    ec.waveform_kind = WaveformKind::Ofdm;
    RunningStats p;
    for (const auto& s : sidelobe_distribution(ec)) p.push(s.pslr_db);
    CHECK_THAT(rows[3].mean_pslr_db, WithinAbs(p.mean, 1e-12));

    CHECK_THROWS_AS(compare_otfs_ofdm(2, {}, 1, 0), std::invalid_argument);
}

TEST_CASE("small relative-error table") {
    Table1Options opt;
    opt.n = 2;
    opt.m = 4;
    opt.density = AxisDensity{8, 8, 6.0};
    const Table1Run run = table1_run(16, 300, 3, opt);
    const RelErrorRow& r = run.row;
    CHECK(r.qam_order == 16);
    for (double e : {r.mean_approx_err, r.mean_bound_err, r.var_approx_err, r.var_bound_err}) {
        CHECK(std::isfinite(e));
        CHECK(e >= 0.0);
    }
    // the upper bounds are looser than the Rice approximation
    CHECK(r.mean_bound_err > r.mean_approx_err);
    CHECK(r.var_bound_err > r.var_approx_err);

    CHECK_THROWS_AS(reproduce_table1({4, 5}, 10, 0, opt), InvalidOrder);
    const auto rows = reproduce_table1({16}, 300, 3, opt);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].mean_approx_err == r.mean_approx_err);
}
