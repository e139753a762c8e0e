#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "wave.hpp"

using namespace fmm;
using testutil::circ_dist;
using testutil::Rng;

TEST_CASE("mobius phase at reference points") {
    // t = alpha: arctan(0), phase is beta
    CHECK(mobius_phase(1.5, 1.5, 0.2, 0.1) == doctest::Approx(0.2).epsilon(1e-14));
    // t - alpha = pi: the half-angle form reaches the pi/2 limit cleanly
    CHECK(mobius_phase(0.7 + kPi, 0.7, 0.0, 0.3) == doctest::Approx(kPi).epsilon(1e-14));
    // omega = 1 collapses onto the linear phase t - alpha
    CHECK(mobius_phase(2.0, 0.5, 0.0, 1.0) == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("mobius phase is finite and wrapped everywhere") {
    Rng rng(11);
    for (int rep = 0; rep < 200; ++rep) {
        const double t = rng.uniform(-10.0, 10.0);
        const double a = rng.uniform(0.0, kTwoPi);
        const double b = rng.uniform(0.0, kTwoPi);
        const double w = rng.uniform(0.0, 1.0);
        const double phi = mobius_phase(t, a, b, w);
        REQUIRE(std::isfinite(phi));
        REQUIRE(phi >= 0.0);
        REQUIRE(phi < kTwoPi);
    }
}

TEST_CASE("wave value examples") {
    const Wave w{2.0, 1.5, 0.2, 0.1};
    // peak value equals the amplitude
    const PeakTimes pt = peak_trough_times(w, true);
    CHECK(wave_value(pt.peak, w) == doctest::Approx(2.0).epsilon(1e-12));
    // frozen arbitrary-precision evaluation of 2*cos(phi(1.5))
    CHECK(wave_value(1.5, w) == doctest::Approx(1.9601331556824833).epsilon(1e-14));
    // zero amplitude is the zero function
    const Wave z{0.0, 1.0, 2.0, 0.5};
    for (double t = 0.0; t < kTwoPi; t += 0.37) CHECK(wave_value(t, z) == 0.0);
}

TEST_CASE("model value sums intercept and waves") {
    Model one;
    one.intercept = 4.25;
    one.waves = {Wave{0.0, 1.0, 1.0, 0.5}};
    CHECK(model_value(0.3, one) == 4.25);

    // frozen per-wave sums for the two-wave configuration at t = 0
    Model two;
    two.intercept = 0.0;
    two.waves = {Wave{2.0, 1.5, 0.2, 0.1}, Wave{2.0, 3.4, 2.3, 0.2}};
    CHECK(wave_value(0.0, two.waves[0]) == doctest::Approx(1.9997978825084043).epsilon(1e-14));
    CHECK(wave_value(0.0, two.waves[1]) == doctest::Approx(-0.8210628134100380).epsilon(1e-13));
    CHECK(model_value(0.0, two) ==
          doctest::Approx(wave_value(0.0, two.waves[0]) + wave_value(0.0, two.waves[1]))
              .epsilon(1e-15));

    // shifting the intercept shifts the value by exactly that amount
    Model shifted = two;
    shifted.intercept += 1.75;
    CHECK(model_value(2.2, shifted) - model_value(2.2, two) == doctest::Approx(1.75).epsilon(1e-15));
}

TEST_CASE("peak and trough times") {
    SUBCASE("beta = 0 peaks at alpha with the trough antipodal") {
        const PeakTimes pt = peak_trough_times(Wave{1.0, 1.2, 0.0, 0.5}, false);
        CHECK(pt.peak == doctest::Approx(1.2).epsilon(1e-14));
        CHECK(pt.trough == doctest::Approx(1.2 + kPi).epsilon(1e-14));
    }
    SUBCASE("frozen wrapped peak for a skewed spike") {
        const PeakTimes pt = peak_trough_times(Wave{2.0, 1.5, 0.2, 0.1}, true);
        CHECK(pt.peak == doctest::Approx(6.2090478535529306).epsilon(1e-13));
        CHECK(pt.trough == doctest::Approx(4.6215263925145667).epsilon(1e-13));
    }
    SUBCASE("formula peak dominates a dense grid scan") {
        const Wave w{1.3, 5.9, 4.4, 0.07};
        const PeakTimes pt = peak_trough_times(w, true);
        const double peak_val = wave_value(pt.peak, w);
        for (int i = 0; i < 20000; ++i) {
            const double t = kTwoPi * i / 20000.0;
            REQUIRE(peak_val >= wave_value(t, w) - 1e-12);
        }
    }
    SUBCASE("omega = 0 is rejected") {
        CHECK_THROWS_AS(peak_trough_times(Wave{1.0, 0.0, 0.0, 0.0}, true), fit_error);
    }
}

TEST_CASE("peak formula agrees with a numeric argmax (randomized)") {
    Rng rng(17);
    const int grid_n = 100000;
    const double step = kTwoPi / grid_n;
    for (int rep = 0; rep < 25; ++rep) {
        const Wave w{rng.uniform(0.5, 3.0), rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi),
                     rng.uniform(0.01, 1.0)};
        const PeakTimes pt = peak_trough_times(w, true);
        double best_t = 0.0, best_v = -1e300;
        double worst_t = 0.0, worst_v = 1e300;
        for (int i = 0; i < grid_n; ++i) {
            const double t = step * i;
            const double v = wave_value(t, w);
            if (v > best_v) {
                best_v = v;
                best_t = t;
            }
            if (v < worst_v) {
                worst_v = v;
                worst_t = t;
            }
        }
        REQUIRE(circ_dist(pt.peak, best_t) <= step);
        REQUIRE(circ_dist(pt.trough, worst_t) <= step);
    }
}

TEST_CASE("wave derivative vanishes at the fiducial points") {
    Rng rng(23);
    const double h = 1e-6;
    for (int rep = 0; rep < 30; ++rep) {
        const Wave w{rng.uniform(0.5, 4.0), rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi),
                     rng.uniform(0.05, 1.0)};
        const PeakTimes pt = peak_trough_times(w, true);
        for (double t0 : {pt.peak, pt.trough}) {
            const double d = (wave_value(t0 + h, w) - wave_value(t0 - h, w)) / (2.0 * h);
            REQUIRE(std::abs(d) <= 1e-6 * w.amp);
        }
    }
}

TEST_CASE("model values repeat with period 2pi") {
    Rng rng(31);
    Model m;
    m.intercept = 0.6;
    for (int j = 0; j < 3; ++j) {
        m.waves.push_back(Wave{rng.uniform(0.1, 3.0), rng.uniform(0.0, kTwoPi),
                               rng.uniform(0.0, kTwoPi), rng.uniform(0.05, 1.0)});
    }
    for (int i = 0; i < 200; ++i) {
        const double t = rng.uniform(0.0, kTwoPi);
        const double a = model_value(t, m);
        const double b = model_value(t + kTwoPi, m);
        REQUIRE(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)));
    }
}

TEST_CASE("unwrapped phase is nondecreasing over a period") {
    Rng rng(37);
    for (int rep = 0; rep < 20; ++rep) {
        const double a = rng.uniform(0.0, kTwoPi);
        const double b = rng.uniform(0.0, kTwoPi);
        const double w = rng.uniform(0.01, 1.0);
        double prev = mobius_phase(0.0, a, b, w);
        double offset = 0.0;
        for (int i = 1; i < 2000; ++i) {
            const double t = kTwoPi * i / 2000.0;
            double cur = mobius_phase(t, a, b, w) + offset;
            while (cur < prev - 1e-9) {
                cur += kTwoPi;
                offset += kTwoPi;
            }
            REQUIRE(cur >= prev - 1e-9);
            prev = cur;
        }
    }
}

TEST_CASE("omega = 1 reduces to the plain cosinor wave") {
    Rng rng(41);
    for (int rep = 0; rep < 20; ++rep) {
        const Wave w{rng.uniform(0.1, 3.0), rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi), 1.0};
        for (int i = 0; i < 50; ++i) {
            const double t = rng.uniform(0.0, kTwoPi);
            const double expected = w.amp * std::cos(t - w.alpha + w.beta);
            REQUIRE(wave_value(t, w) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("make_wave wraps angles and validates ranges") {
    const Wave w = make_wave(1.0, -0.5, kTwoPi + 0.25, 0.5);
    CHECK(w.alpha == doctest::Approx(kTwoPi - 0.5).epsilon(1e-14));
    CHECK(w.beta == doctest::Approx(0.25).epsilon(1e-12));
    CHECK_THROWS_AS(make_wave(-1.0, 0.0, 0.0, 0.5), config_error);
    CHECK_THROWS_AS(make_wave(1.0, 0.0, 0.0, 1.5), config_error);
    CHECK_NOTHROW(make_wave(1.0, 0.0, 0.0, 0.0));  // representable, just unfittable
}

TEST_CASE("model peaks report total-model signal values") {
    Model m;
    m.intercept = 3.0;
    m.waves = {Wave{2.0, 1.5, 0.2, 0.1}, Wave{1.0, 3.4, 2.3, 0.2}};
    const auto peaks = model_peaks(m, true);
    REQUIRE(peaks.size() == 2);
    for (size_t j = 0; j < 2; ++j) {
        CHECK(peaks[j].z_upper == doctest::Approx(model_value(peaks[j].t_upper, m)).epsilon(1e-15));
        CHECK(peaks[j].z_lower == doctest::Approx(model_value(peaks[j].t_lower, m)).epsilon(1e-15));
        CHECK(peaks[j].t_upper >= 0.0);
        CHECK(peaks[j].t_upper < kTwoPi);
        CHECK(peaks[j].z_upper >= peaks[j].z_lower);
    }
}
