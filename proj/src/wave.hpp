#ifndef FMM_WAVE_HPP
#define FMM_WAVE_HPP

#include <vector>

#include "common.hpp"

namespace fmm {

// One frequency modulated Mobius wave: amplitude times the cosine of a
// Mobius-link phase. alpha translates the wave along the period, beta
// controls skewness and omega controls peakedness (omega = 1 is a plain
// sinusoid, omega near 0 a narrow spike).
struct Wave {
    double amp = 0.0;    // >= 0
    double alpha = 0.0;  // [0, 2pi)
    double beta = 0.0;   // [0, 2pi)
    double omega = 1.0;  // [0, 1]
};

// Validating constructor: wraps the angles, rejects negative amplitude and
// omega outside [0, 1].
Wave make_wave(double amp, double alpha, double beta, double omega);

// Intercept plus an ordered list of waves. Fits order waves by decreasing
// explained variance; hand-built models may use any order.
struct Model {
    double intercept = 0.0;
    std::vector<Wave> waves;
};

// Mobius-link phase beta + 2*arctan(omega*tan((t-alpha)/2)), evaluated in the
// half-angle atan2 form so it stays finite and continuous at t-alpha = pi.
// Result wrapped to [0, 2pi).
double mobius_phase(double t, double alpha, double beta, double omega);

double wave_value(double t, const Wave& w);

double model_value(double t, const Model& model);

// Closed-form peak (first) and trough (second) times of a single wave.
// Throws fit_error when omega == 0 (the phase collapses and the formulas are
// undefined). Results are wrapped into [0, 2pi) when wrap_to_2pi is set;
// otherwise they live in (alpha - 2pi, alpha + 2pi).
struct PeakTimes {
    double peak;
    double trough;
};
PeakTimes peak_trough_times(const Wave& w, bool wrap_to_2pi);

// Per-wave peak/trough report evaluated on the full model, so the Z values
// include the intercept and every other wave.
struct WavePeaks {
    double t_upper;
    double z_upper;
    double t_lower;
    double z_lower;
};
std::vector<WavePeaks> model_peaks(const Model& model, bool wrap_to_2pi);

}  // namespace fmm

#endif
