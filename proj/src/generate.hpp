#ifndef FMM_GENERATE_HPP
#define FMM_GENERATE_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "wave.hpp"

namespace fmm {

// Synthetic-data request. The wave parameter lists are recycled cyclically
// (or truncated) to the longest list's length. Sampling happens at
// length_out points equally spaced from `from` to `to` inclusive unless
// explicit time_points are given.
struct GenSpec {
    double intercept = 0.0;
    std::vector<double> amp;
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> omega;
    double from = 0.0;
    double to = kTwoPi;
    int length_out = 100;
    std::vector<double> time_points;  // overrides from/to/length_out when nonempty
    double sigma_noise = 0.0;
    std::optional<std::uint64_t> seed;
};

// Echo of the request with recycled parameter lists, plus the sampled times
// and values (model plus gaussian noise).
struct Generated {
    GenSpec input;
    Model model;
    std::vector<double> t;
    std::vector<double> y;
};

Generated generate(const GenSpec& spec);

// Standard normal variates via Box-Muller over mt19937_64. The engine is
// pinned by the standard and the transform is spelled out here, so a seed
// reproduces the same stream on any platform (std::normal_distribution
// would not).
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : engine_(seed) {}
    double next();

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace fmm

#endif
