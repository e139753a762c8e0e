#ifndef FMM_OPTIMIZE_HPP
#define FMM_OPTIMIZE_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "common.hpp"

namespace fmm {

// Rectangular (alpha, omega) grid. The alpha axis is half-open by default
// (step = span/count, last point short of alpha_hi) which keeps the initial
// [0, 2pi) sweep free of the duplicate endpoint; refined grids are closed so
// the incumbent sits inside. The omega axis is always closed. A count of 1
// pins the axis to its lower bound (used when omega is held fixed).
struct GridSpec {
    int alpha_count = 48;
    double alpha_lo = 0.0;
    double alpha_hi = kTwoPi;
    bool alpha_closed = false;
    int omega_count = 24;
    double omega_lo = kOmegaFloor;
    double omega_hi = 1.0;

    std::vector<double> alpha_values() const;
    std::vector<double> omega_values() const;
};

struct GridResult {
    double alpha = 0.0;
    double omega = 0.0;
    double rss = 0.0;
};

// Evaluates the objective over every grid cell and returns the minimum.
// Ties break toward smaller omega, then smaller alpha, and the reduction is
// index-ordered, so the result is identical with parallel on or off.
// Cells where the objective is non-finite are skipped; if every cell is,
// throws fit_error. eval_count, when given, is incremented per cell.
GridResult grid_minimize(const std::function<double(double, double)>& objective,
                         const GridSpec& spec, bool parallel,
                         std::int64_t* eval_count = nullptr);

struct SimplexConfig {
    int max_evals = 200;
    double rel_tol = 1e-8;  // on the simplex objective spread
};

struct SimplexResult {
    std::vector<double> x;
    double fx = 0.0;
    bool converged = false;  // false when max_evals ran out first
};

// Plain Nelder-Mead downhill simplex over R^n (n = start.size()); the initial
// simplex offsets each coordinate by steps[i]. Never returns a point worse
// than the start. Objectives may return +inf to mark infeasible regions.
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                          const std::vector<double>& start,
                          const std::vector<double>& steps,
                          const SimplexConfig& cfg = {});

// Nelder-Mead specialised to the (alpha, omega) pair: omega is confined to
// [kOmegaFloor, 1] through a +inf penalty (results within 1e-7 of a bound
// snap onto it) and the returned alpha is wrapped to [0, 2pi).
GridResult minimize_alpha_omega(const std::function<double(double, double)>& objective,
                                double alpha0, double omega0,
                                double alpha_step, double omega_step,
                                const SimplexConfig& cfg = {});

// Ordinary least squares of x on [1, z, w] (Householder QR route).
// Throws fit_error on a rank-deficient design.
struct LinearizedFit {
    double intercept = 0.0;
    double delta = 0.0;  // coefficient of z = cos(t*)
    double gamma = 0.0;  // coefficient of w = sin(t*)
    double rss = 0.0;
};
LinearizedFit linearized_ls(std::span<const double> x, std::span<const double> z,
                            std::span<const double> w);

// Non-throwing variant for grid-search hot loops; returns false where
// linearized_ls would throw for rank deficiency.
bool try_linearized_ls(std::span<const double> x, std::span<const double> z,
                       std::span<const double> w, LinearizedFit* out);

// Back-transforms the linearized coefficients into wave parameters:
// A = sqrt(delta^2 + gamma^2), phi = atan2(-gamma, delta),
// beta = wrap(alpha + phi). The intercept passes through.
struct RecoveredWave {
    double intercept = 0.0;
    double amp = 0.0;
    double beta = 0.0;
};
RecoveredWave recover_wave(double intercept, double delta, double gamma, double alpha);

// Least squares of x on an unconstrained intercept plus the columns of phi
// (each length n), with every column coefficient constrained >= 0; active-set
// iteration in the Lawson-Hanson style with the intercept permanently free.
// Throws fit_error on rank deficiency.
struct NonnegFit {
    double intercept = 0.0;
    std::vector<double> coefs;  // all >= 0
    double rss = 0.0;
};
NonnegFit nonneg_joint_ls(std::span<const double> x,
                          const std::vector<std::vector<double>>& phi);

}  // namespace fmm

#endif
