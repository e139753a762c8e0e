#ifndef FMM_TESTS_HELPERS_HPP
#define FMM_TESTS_HELPERS_HPP

#include <cmath>
#include <random>
#include <vector>

#include "common.hpp"

namespace testutil {

// Distance between two angles on the circle, in [0, pi].
inline double circ_dist(double a, double b) {
    const double d = fmm::wrap_angle(a - b);
    return std::min(d, fmm::kTwoPi - d);
}

inline std::vector<double> linspace_closed(double lo, double hi, size_t n) {
    std::vector<double> v(n);
    for (size_t i = 0; i < n; ++i) {
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return v;
}

inline std::vector<double> linspace_half_open(double lo, double hi, size_t n) {
    std::vector<double> v(n);
    for (size_t i = 0; i < n; ++i) {
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
    }
    return v;
}

// Deterministic uniform draws for property tests.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(eng_() >> 11) * 0x1.0p-53);
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace testutil

#endif
