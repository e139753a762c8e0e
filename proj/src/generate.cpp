#include "generate.hpp"

#include <cmath>

namespace fmm {

double NormalSampler::next() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // 53-bit uniforms; u1 kept away from 0 for the log.
    const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = kTwoPi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

namespace {

std::vector<double> recycle(const std::vector<double>& v, size_t len, const char* name) {
    if (v.empty()) {
        throw config_error(std::string("wave parameter list '") + name + "' is empty");
    }
    std::vector<double> out(len);
    for (size_t i = 0; i < len; ++i) out[i] = v[i % v.size()];
    return out;
}

}  // namespace

Generated generate(const GenSpec& spec) {
    if (!(spec.sigma_noise >= 0.0)) {
        throw config_error("sigma_noise must be nonnegative");
    }
    const size_t m = std::max(std::max(spec.amp.size(), spec.alpha.size()),
                              std::max(spec.beta.size(), spec.omega.size()));
    if (m == 0) {
        throw config_error("at least one wave parameter is required");
    }

    Generated out;
    out.input = spec;
    out.input.amp = recycle(spec.amp, m, "A");
    out.input.alpha = recycle(spec.alpha, m, "alpha");
    out.input.beta = recycle(spec.beta, m, "beta");
    out.input.omega = recycle(spec.omega, m, "omega");

    out.model.intercept = spec.intercept;
    out.model.waves.reserve(m);
    for (size_t j = 0; j < m; ++j) {
        out.model.waves.push_back(make_wave(out.input.amp[j], out.input.alpha[j],
                                            out.input.beta[j], out.input.omega[j]));
    }

    if (!spec.time_points.empty()) {
        out.t = spec.time_points;
        for (size_t i = 1; i < out.t.size(); ++i) {
            if (!(out.t[i] > out.t[i - 1])) {
                throw config_error("explicit time points must be strictly increasing");
            }
        }
    } else {
        if (spec.length_out < 1) throw config_error("length_out must be >= 1");
        const size_t len = static_cast<size_t>(spec.length_out);
        out.t.resize(len);
        if (len == 1) {
            out.t[0] = spec.from;
        } else {
            const double step = (spec.to - spec.from) / static_cast<double>(len - 1);
            for (size_t i = 0; i < len; ++i) out.t[i] = spec.from + step * static_cast<double>(i);
        }
    }

    out.y.resize(out.t.size());
    for (size_t i = 0; i < out.t.size(); ++i) out.y[i] = model_value(out.t[i], out.model);
    if (spec.sigma_noise > 0.0) {
        const std::uint64_t seed = spec.seed ? *spec.seed : std::random_device{}();
        NormalSampler sampler(seed);
        for (double& v : out.y) v += spec.sigma_noise * sampler.next();
    }
    return out;
}

}  // namespace fmm
