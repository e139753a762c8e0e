#ifndef FMM_COMMON_HPP
#define FMM_COMMON_HPP

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace fmm {

inline constexpr double kPi = 3.1415926535897932384626433832795;
inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Smallest omega the fitting pipelines will propose. Below this the wave
// degenerates into a spike whose fiducial formulas are ill-conditioned.
inline constexpr double kOmegaFloor = 1e-3;

// Bad user-supplied parameters or fit configuration (CLI exit code 2).
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input data: CSV/JSON parse or shape problems (CLI exit code 3).
class format_error : public std::runtime_error {
public:
    explicit format_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure while fitting: degenerate designs, undefined variance,
// exhausted searches (CLI exit code 4).
class fit_error : public std::runtime_error {
public:
    explicit fit_error(const std::string& msg) : std::runtime_error(msg) {}
};

// 17 significant digits: enough for an exact double round trip through text.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Wraps an angle into [0, 2pi).
inline double wrap_angle(double x) {
    double r = std::fmod(x, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    // fmod of a slightly negative value can land exactly on 2pi after the add
    if (r >= kTwoPi) r -= kTwoPi;
    return r;
}

}  // namespace fmm

#endif
