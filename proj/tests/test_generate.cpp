#include <doctest.h>

#include <cmath>

#include "generate.hpp"
#include "helpers.hpp"

using namespace fmm;

TEST_CASE("generate at a single explicit time point") {
    GenSpec spec;
    spec.intercept = 0.0;
    spec.amp = {1.0};
    spec.alpha = {0.0};
    spec.beta = {0.0};
    spec.omega = {1.0};
    spec.time_points = {0.0};
    const Generated g = generate(spec);
    REQUIRE(g.y.size() == 1);
    CHECK(g.y[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("noiseless output equals the model pointwise") {
    GenSpec spec;
    spec.intercept = 2.0;
    spec.amp = {2.0, 1.0};
    spec.alpha = {1.5, 3.4};
    spec.beta = {0.2, 2.3};
    spec.omega = {0.1, 0.2};
    const Generated g = generate(spec);
    REQUIRE(g.y.size() == 100);
    for (size_t i = 0; i < g.t.size(); ++i) {
        REQUIRE(std::abs(g.y[i] - model_value(g.t[i], g.model)) <= 1e-12);
    }
}

TEST_CASE("default time grid spans 0 to 2pi inclusive") {
    GenSpec spec;
    spec.amp = {1.0};
    spec.alpha = {0.0};
    spec.beta = {0.0};
    spec.omega = {1.0};
    const Generated g = generate(spec);
    REQUIRE(g.t.size() == 100);
    CHECK(g.t.front() == 0.0);
    CHECK(g.t.back() == doctest::Approx(kTwoPi).epsilon(1e-15));
    CHECK(g.t[1] == doctest::Approx(0.063466518254339256).epsilon(1e-14));
}

TEST_CASE("parameter lists recycle to the longest length") {
    GenSpec spec;
    spec.amp = {2.0};
    spec.alpha = {1.5, 3.4};
    spec.beta = {0.2, 2.3, 1.0};
    spec.omega = {0.1};
    const Generated g = generate(spec);
    REQUIRE(g.input.amp == std::vector<double>{2.0, 2.0, 2.0});
    REQUIRE(g.input.alpha == std::vector<double>{1.5, 3.4, 1.5});
    REQUIRE(g.input.beta == std::vector<double>{0.2, 2.3, 1.0});
    REQUIRE(g.input.omega == std::vector<double>{0.1, 0.1, 0.1});
    CHECK(g.model.waves.size() == 3);
}

TEST_CASE("empty parameter lists are rejected") {
    GenSpec spec;
    spec.amp = {};
    spec.alpha = {1.0};
    spec.beta = {1.0};
    spec.omega = {0.5};
    CHECK_THROWS_AS(generate(spec), config_error);
}

TEST_CASE("seeds make the noise reproducible") {
    GenSpec spec;
    spec.amp = {1.0};
    spec.alpha = {1.0};
    spec.beta = {1.0};
    spec.omega = {0.5};
    spec.sigma_noise = 0.3;
    spec.seed = 7;
    const Generated a = generate(spec);
    const Generated b = generate(spec);
    CHECK(a.y == b.y);
    spec.seed = 8;
    const Generated c = generate(spec);
    CHECK(a.y != c.y);
}

TEST_CASE("noise variance matches sigma squared") {
    GenSpec spec;
    spec.amp = {1.0};
    spec.alpha = {1.0};
    spec.beta = {1.0};
    spec.omega = {0.5};
    spec.length_out = 100000;
    spec.sigma_noise = 0.3;
    spec.seed = 123;
    const Generated noisy = generate(spec);
    spec.sigma_noise = 0.0;
    const Generated clean = generate(spec);
    double mean = 0.0;
    for (size_t i = 0; i < noisy.y.size(); ++i) mean += noisy.y[i] - clean.y[i];
    mean /= static_cast<double>(noisy.y.size());
    double var = 0.0;
    for (size_t i = 0; i < noisy.y.size(); ++i) {
        const double d = noisy.y[i] - clean.y[i] - mean;
        var += d * d;
    }
    var /= static_cast<double>(noisy.y.size() - 1);
    CHECK(var == doctest::Approx(0.09).epsilon(0.05));
}

TEST_CASE("explicit time points must increase") {
    GenSpec spec;
    spec.amp = {1.0};
    spec.alpha = {1.0};
    spec.beta = {1.0};
    spec.omega = {0.5};
    spec.time_points = {0.0, 0.5, 0.5};
    CHECK_THROWS_AS(generate(spec), config_error);
}
