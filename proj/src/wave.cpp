#include "wave.hpp"

#include <cmath>

namespace fmm {

Wave make_wave(double amp, double alpha, double beta, double omega) {
    if (!(amp >= 0.0) || !std::isfinite(amp)) {
        throw config_error("wave amplitude must be a nonnegative finite value");
    }
    if (!(omega >= 0.0 && omega <= 1.0)) {
        throw config_error("wave omega must lie in [0, 1]");
    }
    if (!std::isfinite(alpha) || !std::isfinite(beta)) {
        throw config_error("wave angles must be finite");
    }
    return Wave{amp, wrap_angle(alpha), wrap_angle(beta), omega};
}

double mobius_phase(double t, double alpha, double beta, double omega) {
    const double half = 0.5 * (t - alpha);
    const double phi = beta + 2.0 * std::atan2(omega * std::sin(half), std::cos(half));
    return wrap_angle(phi);
}

double wave_value(double t, const Wave& w) {
    return w.amp * std::cos(mobius_phase(t, w.alpha, w.beta, w.omega));
}

double model_value(double t, const Model& model) {
    double v = model.intercept;
    for (const Wave& w : model.waves) v += wave_value(t, w);
    return v;
}

PeakTimes peak_trough_times(const Wave& w, bool wrap_to_2pi) {
    if (w.omega <= 0.0) {
        throw fit_error("peak/trough undefined for omega = 0 (degenerate wave)");
    }
    // t = alpha + 2*arctan((1/omega)*tan(theta)) with theta = -beta/2 for the
    // peak and (pi - beta)/2 for the trough; atan2 form avoids the tan poles
    // at beta = pi and beta = 0 respectively.
    const double inv = 1.0 / w.omega;
    const double thU = -0.5 * w.beta;
    const double thL = 0.5 * (kPi - w.beta);
    double tU = w.alpha + 2.0 * std::atan2(inv * std::sin(thU), std::cos(thU));
    double tL = w.alpha + 2.0 * std::atan2(inv * std::sin(thL), std::cos(thL));
    if (wrap_to_2pi) {
        tU = wrap_angle(tU);
        tL = wrap_angle(tL);
    }
    return PeakTimes{tU, tL};
}

std::vector<WavePeaks> model_peaks(const Model& model, bool wrap_to_2pi) {
    std::vector<WavePeaks> out;
    out.reserve(model.waves.size());
    for (const Wave& w : model.waves) {
        const PeakTimes pt = peak_trough_times(w, wrap_to_2pi);
        out.push_back(WavePeaks{pt.peak, model_value(pt.peak, model),
                                pt.trough, model_value(pt.trough, model)});
    }
    return out;
}

}  // namespace fmm
