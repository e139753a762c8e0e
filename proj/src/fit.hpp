#ifndef FMM_FIT_HPP
#define FMM_FIT_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "timeseries.hpp"
#include "wave.hpp"

namespace fmm {

enum class StopRule {
    AlwaysFalse,  // run exactly maxiter backfitting passes
    R2Delta,      // stop once R2_k - R2_{k-1} <= dif_max
};

struct FitConfig {
    int nback = 1;
    int length_alpha_grid = 48;
    int length_omega_grid = 24;
    int num_reps = 3;
    int maxiter = 0;  // 0 means "same as nback"
    StopRule stop_rule = StopRule::AlwaysFalse;
    double dif_max = 0.0;
    std::vector<int> beta_blocks;   // empty means 1..nback (no restriction)
    std::vector<int> omega_blocks;  // empty means 1..nback (no restriction)
    bool parallelize = false;
};

struct FitResult {
    Model model;  // waves ordered by decreasing explained variance
    std::vector<double> time_points;
    std::vector<double> fitted_values;
    std::vector<double> residuals;
    double sse = 0.0;
    std::vector<double> r2_per_wave;  // incremental attribution, same order as waves
    double r2_total = 0.0;
    int n_iter = 0;
    bool stopped_by_rule = false;  // false: ran out of maxiter passes
    std::vector<WavePeaks> peaks;  // wrapped into [0, 2pi)

    // diagnostics, not part of any serialized format
    std::vector<double> r2_trace;           // R2 after each backfitting pass
    std::int64_t grid_evaluations = 0;      // linearized-LS cells visited in grid stages
};

// 1 - SSE/TSS. Throws fit_error when the data variance is zero.
double r_squared(std::span<const double> data, std::span<const double> fitted);

// Direction of the resultant of unit vectors at the given angles, wrapped to
// [0, 2pi). Throws fit_error when the resultant length is below 1e-9 (the
// mean direction is undefined, e.g. {0, pi}).
double angular_mean(std::span<const double> angles);

// Single-wave fit: (alpha, omega) grid search with refinements, Nelder-Mead
// polish, and the linearized solve for (M, A, beta). omega_fixed pins omega
// and drops that grid/simplex dimension.
FitResult fit_mono(const TimeSeries& data, const FitConfig& cfg,
                   std::optional<double> omega_fixed = std::nullopt);

// Multicomponent backfitting: each pass refits every wave against its
// partial residual, then a joint nonnegative-amplitude least squares sets
// the intercept and amplitudes. Ignores any restriction blocks in cfg.
FitResult fit_multi(const TimeSeries& data, const FitConfig& cfg);

// Backfitting with equality blocks on beta and/or omega. Identity blocks
// reproduce fit_multi exactly.
FitResult fit_restricted(const TimeSeries& data, const FitConfig& cfg);

// Greedy incremental R2 attribution: the strongest single wave gets its
// standalone R2, each further wave the gain from adding it to the selected
// set. Returned in the model's wave order; entries sum to the full-model R2.
std::vector<double> attribute_wave_r2(const TimeSeries& data, const Model& model);

}  // namespace fmm

#endif
