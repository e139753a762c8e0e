#include <doctest.h>

#include <cmath>
#include <cstring>

#include "fit.hpp"
#include "generate.hpp"
#include "helpers.hpp"

using namespace fmm;
using testutil::circ_dist;
using testutil::Rng;

namespace {

TimeSeries series_from(const Generated& g) {
    TimeSeries ts;
    ts.time_points = g.t;
    ts.values = g.y;
    return ts;
}

TimeSeries noiseless_wave(double m, double amp, double alpha, double beta, double omega,
                          int n = 100) {
    GenSpec spec;
    spec.intercept = m;
    spec.amp = {amp};
    spec.alpha = {alpha};
    spec.beta = {beta};
    spec.omega = {omega};
    spec.length_out = n;
    return series_from(generate(spec));
}

// The two-wave configuration used throughout: M = 0, A = (2, 2),
// alpha = (1.5, 3.4), beta = (0.2, 2.3), omega = (0.1, 0.2).
TimeSeries two_wave_series(double sigma, std::uint64_t seed) {
    GenSpec spec;
    spec.intercept = 0.0;
    spec.amp = {2.0, 2.0};
    spec.alpha = {1.5, 3.4};
    spec.beta = {0.2, 2.3};
    spec.omega = {0.1, 0.2};
    spec.sigma_noise = sigma;
    spec.seed = seed;
    return series_from(generate(spec));
}

bool same_fit(const FitResult& a, const FitResult& b) {
    if (a.model.waves.size() != b.model.waves.size()) return false;
    if (std::memcmp(&a.model.intercept, &b.model.intercept, sizeof(double)) != 0) return false;
    for (size_t j = 0; j < a.model.waves.size(); ++j) {
        if (std::memcmp(&a.model.waves[j], &b.model.waves[j], sizeof(Wave)) != 0) return false;
    }
    if (a.fitted_values != b.fitted_values) return false;
    if (a.residuals != b.residuals) return false;
    if (a.r2_per_wave != b.r2_per_wave) return false;
    return a.sse == b.sse && a.r2_total == b.r2_total && a.n_iter == b.n_iter;
}

}  // namespace

TEST_CASE("r_squared definitional cases") {
    std::vector<double> data{1.0, 2.0, 3.0, 4.0};
    CHECK(r_squared(data, data) == doctest::Approx(1.0));
    std::vector<double> at_mean(4, 2.5);
    CHECK(r_squared(data, at_mean) == doctest::Approx(0.0));
    std::vector<double> worse{4.0, 1.0, 4.0, 1.0};
    CHECK(r_squared(data, worse) < 0.0);
    std::vector<double> constant(4, 1.0);
    CHECK_THROWS_AS(r_squared(constant, at_mean), fit_error);
}

TEST_CASE("angular_mean") {
    std::vector<double> same{0.2, 0.2};
    CHECK(angular_mean(same) == doctest::Approx(0.2).epsilon(1e-14));
    std::vector<double> straddle{kTwoPi - 0.1, 0.1};
    CHECK(angular_mean(straddle) == doctest::Approx(0.0).epsilon(1e-12));
    std::vector<double> opposite{0.0, kPi};
    CHECK_THROWS_AS(angular_mean(opposite), fit_error);
    CHECK_THROWS_AS(angular_mean(std::vector<double>{}), config_error);
}

TEST_CASE("fit_mono recovers a noiseless spiked wave") {
    const TimeSeries ts = noiseless_wave(0.0, 2.0, 1.5, 0.2, 0.1);
    const FitResult res = fit_mono(ts, FitConfig{});
    CHECK(res.r2_total >= 0.9999);
    REQUIRE(res.model.waves.size() == 1);
    const Wave& w = res.model.waves[0];
    CHECK(std::abs(w.amp - 2.0) / 2.0 <= 0.02);
    CHECK(circ_dist(w.alpha, 1.5) <= 0.05);
    CHECK(circ_dist(w.beta, 0.2) <= 0.05);
    CHECK(std::abs(w.omega - 0.1) <= 0.02);
    CHECK(std::abs(res.model.intercept) <= 0.05);
    // bookkeeping invariants
    REQUIRE(res.fitted_values.size() == ts.size());
    for (size_t i = 0; i < ts.size(); ++i) {
        CHECK(res.residuals[i] == ts.values[i] - res.fitted_values[i]);
    }
    double sse = 0.0;
    for (double r : res.residuals) sse += r * r;
    CHECK(res.sse == doctest::Approx(sse).epsilon(1e-12));
    REQUIRE(res.r2_per_wave.size() == 1);
    CHECK(res.r2_per_wave[0] == doctest::Approx(res.r2_total).epsilon(1e-9));
}

TEST_CASE("fit_mono on a pure sinusoid pushes omega to the top of its range") {
    const TimeSeries ts = noiseless_wave(1.0, 1.5, 2.0, 0.7, 1.0);
    const FitResult res = fit_mono(ts, FitConfig{});
    CHECK(res.model.waves[0].omega >= 0.9);
    CHECK(res.r2_total >= 0.999);
}

TEST_CASE("fit_mono honours a fixed omega") {
    const TimeSeries ts = noiseless_wave(0.0, 2.0, 1.5, 0.2, 0.1);
    const FitResult res = fit_mono(ts, FitConfig{}, 0.1);
    CHECK(res.model.waves[0].omega == 0.1);
    CHECK(res.r2_total >= 0.9999);
    CHECK_THROWS_AS(fit_mono(ts, FitConfig{}, 0.0), config_error);
}

TEST_CASE("degenerate inputs are rejected") {
    TimeSeries constant;
    constant.time_points = testutil::linspace_half_open(0.0, kTwoPi, 20);
    constant.values.assign(20, 3.0);
    CHECK_THROWS_AS(fit_mono(constant, FitConfig{}), fit_error);

    TimeSeries tiny;
    tiny.time_points = {0.0, 1.0, 2.0, 3.0};
    tiny.values = {0.0, 1.0, 0.0, -1.0};
    CHECK_THROWS_AS(fit_mono(tiny, FitConfig{}), config_error);

    FitConfig bad;
    bad.nback = 0;
    const TimeSeries ts = noiseless_wave(0.0, 1.0, 1.0, 1.0, 0.5);
    CHECK_THROWS_AS(fit_multi(ts, bad), config_error);
}

TEST_CASE("fit_multi on the two-wave scenario") {
    const TimeSeries ts = two_wave_series(0.3, 15);
    FitConfig cfg;
    cfg.nback = 2;
    cfg.maxiter = 2;
    const FitResult res = fit_multi(ts, cfg);
    CHECK(res.r2_total >= 0.94);
    CHECK(res.r2_total <= 0.99);
    CHECK(res.n_iter == 2);
    CHECK_FALSE(res.stopped_by_rule);
    REQUIRE(res.r2_per_wave.size() == 2);
    CHECK(res.r2_per_wave[0] >= res.r2_per_wave[1]);
    for (double r2 : res.r2_per_wave) {
        CHECK(r2 >= 0.0);
        CHECK(r2 <= 1.0);
    }
    // both true waves should be found (order by explained variance)
    CHECK(circ_dist(res.model.waves[0].alpha, 3.4) <= 0.25);
    CHECK(circ_dist(res.model.waves[1].alpha, 1.5) <= 0.25);
}

TEST_CASE("R2 stop rule halts the backfitting early") {
    const TimeSeries ts = two_wave_series(0.3, 15);
    FitConfig cfg;
    cfg.nback = 2;
    cfg.maxiter = 5;
    cfg.stop_rule = StopRule::R2Delta;
    cfg.dif_max = 0.01;
    const FitResult res = fit_multi(ts, cfg);
    CHECK(res.n_iter <= 5);
    CHECK(res.stopped_by_rule);
    CHECK(res.r2_total >= 0.94);
}

TEST_CASE("single-wave backfitting equals the mono fit") {
    const TimeSeries ts = two_wave_series(0.3, 99);
    FitConfig cfg;
    cfg.nback = 1;
    const FitResult a = fit_mono(ts, cfg);
    const FitResult b = fit_multi(ts, cfg);
    CHECK(same_fit(a, b));
}

TEST_CASE("backfitting R2 is nondecreasing and the joint finish never hurts") {
    Rng rng(55);
    for (int rep = 0; rep < 3; ++rep) {
        GenSpec spec;
        spec.intercept = rng.uniform(-1.0, 1.0);
        spec.amp = {rng.uniform(1.0, 3.0), rng.uniform(1.0, 3.0)};
        spec.alpha = {rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi)};
        spec.beta = {rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi)};
        spec.omega = {rng.uniform(0.05, 0.6), rng.uniform(0.05, 0.6)};
        spec.sigma_noise = 0.25;
        spec.seed = 1000 + rep;
        const TimeSeries ts = series_from(generate(spec));
        FitConfig cfg;
        cfg.nback = 2;
        cfg.maxiter = 4;
        const FitResult res = fit_multi(ts, cfg);
        for (size_t k = 1; k < res.r2_trace.size(); ++k) {
            REQUIRE(res.r2_trace[k] >= res.r2_trace[k - 1] - 1e-9);
        }
        REQUIRE(res.r2_total >= res.r2_trace.back() - 1e-9);
    }
}

TEST_CASE("restricted fit with identity blocks equals the unrestricted fit") {
    const TimeSeries ts = two_wave_series(0.3, 7);
    FitConfig cfg;
    cfg.nback = 2;
    cfg.beta_blocks = {1, 2};
    cfg.omega_blocks = {1, 2};
    const FitResult a = fit_restricted(ts, cfg);
    const FitResult b = fit_multi(ts, cfg);
    CHECK(same_fit(a, b));
}

TEST_CASE("beta blocks force exact within-block equality") {
    GenSpec spec;
    spec.intercept = 1.0;
    spec.amp = {2.0, 1.5};
    spec.alpha = {1.0, 4.0};
    spec.beta = {3.0, 3.0};
    spec.omega = {0.2, 0.1};
    spec.sigma_noise = 0.2;
    spec.seed = 42;
    const TimeSeries ts = series_from(generate(spec));
    FitConfig cfg;
    cfg.nback = 2;
    cfg.beta_blocks = {1, 1};
    const FitResult res = fit_restricted(ts, cfg);
    REQUIRE(res.model.waves.size() == 2);
    CHECK(res.model.waves[0].beta == res.model.waves[1].beta);
    CHECK(circ_dist(res.model.waves[0].beta, 3.0) <= 0.3);
    CHECK(res.r2_total >= 0.9);
}

TEST_CASE("omega blocks force exact within-block equality") {
    GenSpec spec;
    spec.intercept = 0.5;
    spec.amp = {2.0, 1.5};
    spec.alpha = {1.0, 4.0};
    spec.beta = {0.5, 2.5};
    spec.omega = {0.15, 0.15};
    spec.sigma_noise = 0.2;
    spec.seed = 43;
    const TimeSeries ts = series_from(generate(spec));
    FitConfig cfg;
    cfg.nback = 2;
    cfg.omega_blocks = {1, 1};
    const FitResult res = fit_restricted(ts, cfg);
    REQUIRE(res.model.waves.size() == 2);
    CHECK(res.model.waves[0].omega == res.model.waves[1].omega);
    CHECK(std::abs(res.model.waves[0].omega - 0.15) <= 0.05);
    CHECK(res.r2_total >= 0.9);
}

TEST_CASE("restriction vectors are validated") {
    const TimeSeries ts = two_wave_series(0.3, 7);
    FitConfig cfg;
    cfg.nback = 2;
    cfg.beta_blocks = {1};
    CHECK_THROWS_AS(fit_restricted(ts, cfg), config_error);
    cfg.beta_blocks = {1, -1};
    CHECK_THROWS_AS(fit_restricted(ts, cfg), config_error);
    cfg.beta_blocks = {1, 1};
    cfg.omega_blocks = {0, 1};
    CHECK_THROWS_AS(fit_restricted(ts, cfg), config_error);
}

TEST_CASE("fits are deterministic, with and without parallel grids") {
    const TimeSeries ts = two_wave_series(0.3, 21);
    FitConfig cfg;
    cfg.nback = 2;
    const FitResult a = fit_multi(ts, cfg);
    const FitResult b = fit_multi(ts, cfg);
    CHECK(same_fit(a, b));
    cfg.parallelize = true;
    const FitResult c = fit_multi(ts, cfg);
    CHECK(same_fit(a, c));
}

TEST_CASE("circularly shifting the data shifts alpha and nothing else") {
    const double shift = 5.0 * kTwoPi / 100.0;  // five grid positions
    const TimeSeries a = noiseless_wave(0.4, 2.0, 1.5, 0.8, 0.25);
    const TimeSeries b = noiseless_wave(0.4, 2.0, wrap_angle(1.5 + shift), 0.8, 0.25);
    const FitResult fa = fit_mono(a, FitConfig{});
    const FitResult fb = fit_mono(b, FitConfig{});
    CHECK(circ_dist(fb.model.waves[0].alpha, fa.model.waves[0].alpha + shift) <= 0.05);
    CHECK(std::abs(fb.model.waves[0].amp - fa.model.waves[0].amp) <= 1e-3);
    CHECK(circ_dist(fb.model.waves[0].beta, fa.model.waves[0].beta) <= 1e-3);
    CHECK(std::abs(fb.model.waves[0].omega - fa.model.waves[0].omega) <= 1e-3);
    CHECK(std::abs(fb.model.intercept - fa.model.intercept) <= 1e-3);
}

TEST_CASE("affine value transforms map the fit the obvious way") {
    const double a = 2.5, b = -1.25;
    const TimeSeries base = noiseless_wave(0.4, 2.0, 1.5, 0.8, 0.25);
    TimeSeries scaled = base;
    for (double& v : scaled.values) v = a * v + b;
    const FitResult f0 = fit_mono(base, FitConfig{});
    const FitResult f1 = fit_mono(scaled, FitConfig{});
    CHECK(circ_dist(f1.model.waves[0].alpha, f0.model.waves[0].alpha) <= 1e-3);
    CHECK(circ_dist(f1.model.waves[0].beta, f0.model.waves[0].beta) <= 1e-3);
    CHECK(std::abs(f1.model.waves[0].omega - f0.model.waves[0].omega) <= 1e-3);
    CHECK(std::abs(f1.model.waves[0].amp - a * f0.model.waves[0].amp) <= 1e-3 * a);
    CHECK(std::abs(f1.model.intercept - (a * f0.model.intercept + b)) <= 1e-3 * a);
    const bool same_phase = f1.model.waves[0].alpha == f0.model.waves[0].alpha &&
                            f1.model.waves[0].beta == f0.model.waves[0].beta &&
                            f1.model.waves[0].omega == f0.model.waves[0].omega;
    if (same_phase) {
        CHECK(std::abs(f1.r2_total - f0.r2_total) <= 1e-12);
    } else {
        CHECK(std::abs(f1.r2_total - f0.r2_total) <= 1e-6);
    }
}

TEST_CASE("attribute_wave_r2") {
    SUBCASE("single wave gets the whole R2") {
        const TimeSeries ts = noiseless_wave(0.0, 2.0, 1.5, 0.2, 0.1);
        const FitResult res = fit_mono(ts, FitConfig{});
        const auto attr = attribute_wave_r2(ts, res.model);
        REQUIRE(attr.size() == 1);
        CHECK(attr[0] == doctest::Approx(res.r2_total).epsilon(1e-9));
    }
    SUBCASE("orthogonal waves split the R2 into their standalone shares") {
        GenSpec spec;
        spec.intercept = 0.0;
        spec.amp = {2.0, 1.0};
        spec.alpha = {0.0, kPi / 2.0};
        spec.beta = {0.0, 0.0};
        spec.omega = {1.0, 1.0};
        spec.length_out = 64;
        spec.time_points = testutil::linspace_half_open(0.0, kTwoPi, 64);
        const Generated g = generate(spec);
        TimeSeries ts = series_from(g);
        const auto attr = attribute_wave_r2(ts, g.model);

        // oracle: cumulative R2 computed directly per subset
        auto subset_r2 = [&](const std::vector<int>& idx) {
            std::vector<double> base(ts.size(), 0.0);
            for (int j : idx) {
                for (size_t i = 0; i < ts.size(); ++i) {
                    base[i] += wave_value(ts.time_points[i], g.model.waves[j]);
                }
            }
            double mu = 0.0;
            for (size_t i = 0; i < ts.size(); ++i) mu += ts.values[i] - base[i];
            mu /= static_cast<double>(ts.size());
            double sse = 0.0, tss = 0.0, xm = 0.0;
            for (double v : ts.values) xm += v;
            xm /= static_cast<double>(ts.size());
            for (size_t i = 0; i < ts.size(); ++i) {
                sse += (ts.values[i] - base[i] - mu) * (ts.values[i] - base[i] - mu);
                tss += (ts.values[i] - xm) * (ts.values[i] - xm);
            }
            return 1.0 - sse / tss;
        };
        const double r2_first = subset_r2({0});
        const double r2_both = subset_r2({0, 1});
        CHECK(attr[0] == doctest::Approx(r2_first).epsilon(1e-9));
        CHECK(attr[0] + attr[1] == doctest::Approx(r2_both).epsilon(1e-6));
        // orthogonality makes the second increment its standalone share
        CHECK(attr[1] == doctest::Approx(subset_r2({1})).epsilon(1e-6));
    }
}
