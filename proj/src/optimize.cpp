#include "optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

namespace fmm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Householder QR least squares, min ||A c - b||. A is column-major with n
// rows and k columns; both A and b are clobbered. Returns false when the
// design is rank deficient.
bool qr_lstsq(std::vector<double>& a, std::vector<double>& b, int n, int k,
              double* coef) {
    double scale = 0.0;
    for (int j = 0; j < k; ++j) {
        double s2 = 0.0;
        for (int i = 0; i < n; ++i) s2 += a[j * n + i] * a[j * n + i];
        scale = std::max(scale, std::sqrt(s2));
    }
    const double rank_tol = scale * 1e-10 + 1e-300;

    for (int j = 0; j < k; ++j) {
        double* col = a.data() + j * n;
        double s2 = 0.0;
        for (int i = j; i < n; ++i) s2 += col[i] * col[i];
        double sigma = std::sqrt(s2);
        if (sigma <= rank_tol) return false;
        if (col[j] > 0.0) sigma = -sigma;
        const double v1 = col[j] - sigma;
        const double vtv = s2 - col[j] * col[j] + v1 * v1;
        col[j] = v1;
        if (vtv > 0.0) {
            for (int l = j + 1; l < k; ++l) {
                double* cl = a.data() + l * n;
                double dot = 0.0;
                for (int i = j; i < n; ++i) dot += col[i] * cl[i];
                const double f = 2.0 * dot / vtv;
                for (int i = j; i < n; ++i) cl[i] -= f * col[i];
            }
            double dot = 0.0;
            for (int i = j; i < n; ++i) dot += col[i] * b[i];
            const double f = 2.0 * dot / vtv;
            for (int i = j; i < n; ++i) b[i] -= f * col[i];
        }
        col[j] = sigma;
    }
    for (int j = k - 1; j >= 0; --j) {
        double s = b[j];
        for (int l = j + 1; l < k; ++l) s -= a[l * n + j] * coef[l];
        coef[j] = s / a[j * n + j];
    }
    return true;
}

}  // namespace

std::vector<double> GridSpec::alpha_values() const {
    std::vector<double> v(static_cast<size_t>(std::max(alpha_count, 1)));
    const int c = static_cast<int>(v.size());
    if (c == 1) {
        v[0] = alpha_lo;
    } else {
        const double step = (alpha_hi - alpha_lo) / (alpha_closed ? c - 1 : c);
        for (int i = 0; i < c; ++i) v[i] = alpha_lo + step * i;
    }
    return v;
}

std::vector<double> GridSpec::omega_values() const {
    std::vector<double> v(static_cast<size_t>(std::max(omega_count, 1)));
    const int c = static_cast<int>(v.size());
    if (c == 1) {
        v[0] = omega_lo;
    } else {
        const double step = (omega_hi - omega_lo) / (c - 1);
        for (int i = 0; i < c; ++i) v[i] = omega_lo + step * i;
    }
    return v;
}

GridResult grid_minimize(const std::function<double(double, double)>& objective,
                         const GridSpec& spec, bool parallel,
                         std::int64_t* eval_count) {
    const std::vector<double> alphas = spec.alpha_values();
    const std::vector<double> omegas = spec.omega_values();
    const size_t na = alphas.size();
    const size_t total = na * omegas.size();
    std::vector<double> vals(total);

    auto eval_range = [&](size_t lo, size_t hi) {
        for (size_t idx = lo; idx < hi; ++idx) {
            vals[idx] = objective(alphas[idx % na], omegas[idx / na]);
        }
    };

    unsigned n_threads = 1;
    if (parallel && total >= 64) {
        n_threads = std::min(std::thread::hardware_concurrency(), 16u);
        if (n_threads == 0) n_threads = 1;
    }
    if (n_threads > 1) {
        std::vector<std::thread> workers;
        workers.reserve(n_threads);
        const size_t chunk = (total + n_threads - 1) / n_threads;
        for (unsigned t = 0; t < n_threads; ++t) {
            const size_t lo = std::min(total, t * chunk);
            const size_t hi = std::min(total, lo + chunk);
            if (lo < hi) workers.emplace_back(eval_range, lo, hi);
        }
        for (auto& w : workers) w.join();
    } else {
        eval_range(0, total);
    }
    if (eval_count) *eval_count += static_cast<std::int64_t>(total);

    // Index-ordered reduction; cells are laid out omega-major, so strict <
    // keeps the smallest omega, then the smallest alpha, among ties.
    size_t best = total;
    double best_val = kInf;
    for (size_t idx = 0; idx < total; ++idx) {
        if (std::isfinite(vals[idx]) && vals[idx] < best_val) {
            best_val = vals[idx];
            best = idx;
        }
    }
    if (best == total) {
        throw fit_error("grid search found no evaluable cell (degenerate design everywhere)");
    }
    return GridResult{alphas[best % na], omegas[best / na], best_val};
}

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                          const std::vector<double>& start,
                          const std::vector<double>& steps,
                          const SimplexConfig& cfg) {
    const size_t n = start.size();
    std::vector<std::vector<double>> verts(n + 1, start);
    for (size_t i = 0; i < n; ++i) verts[i + 1][i] += steps[i];

    std::vector<double> fv(n + 1);
    int evals = 0;
    for (size_t i = 0; i <= n; ++i) {
        fv[i] = objective(verts[i]);
        ++evals;
    }

    std::vector<size_t> order(n + 1);
    bool converged = false;
    while (evals < cfg.max_evals) {
        std::iota(order.begin(), order.end(), size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](size_t a, size_t b) { return fv[a] < fv[b]; });
        const size_t ibest = order[0];
        const size_t iworst = order[n];
        const size_t isecond = order[n == 0 ? 0 : n - 1];

        if (std::isfinite(fv[iworst]) &&
            fv[iworst] - fv[ibest] <= cfg.rel_tol * (std::abs(fv[ibest]) + cfg.rel_tol)) {
            converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (size_t i = 0; i <= n; ++i) {
            if (i == iworst) continue;
            for (size_t d = 0; d < n; ++d) centroid[d] += verts[i][d];
        }
        for (size_t d = 0; d < n; ++d) centroid[d] /= static_cast<double>(n);

        auto point_at = [&](double coef) {
            std::vector<double> p(n);
            for (size_t d = 0; d < n; ++d) {
                p[d] = centroid[d] + coef * (centroid[d] - verts[iworst][d]);
            }
            return p;
        };

        std::vector<double> xr = point_at(1.0);
        const double fr = objective(xr);
        ++evals;
        if (fr < fv[ibest]) {
            std::vector<double> xe = point_at(2.0);
            const double fe = objective(xe);
            ++evals;
            if (fe < fr) {
                verts[iworst] = std::move(xe);
                fv[iworst] = fe;
            } else {
                verts[iworst] = std::move(xr);
                fv[iworst] = fr;
            }
        } else if (fr < fv[isecond]) {
            verts[iworst] = std::move(xr);
            fv[iworst] = fr;
        } else {
            const bool outside = fr < fv[iworst];
            std::vector<double> xc = point_at(outside ? 0.5 : -0.5);
            const double fc = objective(xc);
            ++evals;
            if (fc < (outside ? fr : fv[iworst])) {
                verts[iworst] = std::move(xc);
                fv[iworst] = fc;
            } else {
                for (size_t i = 0; i <= n; ++i) {
                    if (i == ibest) continue;
                    for (size_t d = 0; d < n; ++d) {
                        verts[i][d] = verts[ibest][d] + 0.5 * (verts[i][d] - verts[ibest][d]);
                    }
                    fv[i] = objective(verts[i]);
                    ++evals;
                }
            }
        }
    }

    size_t ibest = 0;
    for (size_t i = 1; i <= n; ++i) {
        if (fv[i] < fv[ibest]) ibest = i;
    }
    return SimplexResult{verts[ibest], fv[ibest], converged};
}

GridResult minimize_alpha_omega(const std::function<double(double, double)>& objective,
                                double alpha0, double omega0,
                                double alpha_step, double omega_step,
                                const SimplexConfig& cfg) {
    auto penalized = [&](const std::vector<double>& v) {
        if (v[1] < kOmegaFloor || v[1] > 1.0) return kInf;
        return objective(v[0], v[1]);
    };
    SimplexResult r = nelder_mead(penalized, {alpha0, omega0},
                                  {alpha_step, omega_step}, cfg);
    double alpha = wrap_angle(r.x[0]);
    double omega = r.x[1];
    double fx = objective(alpha, omega);
    // Land exactly on the omega boundary when the simplex converged against it.
    double snapped = omega;
    if (std::abs(omega - 1.0) < 1e-7) snapped = 1.0;
    if (std::abs(omega - kOmegaFloor) < 1e-7) snapped = kOmegaFloor;
    if (snapped != omega) {
        const double fs = objective(alpha, snapped);
        if (fs <= fx) {
            omega = snapped;
            fx = fs;
        }
    }
    return GridResult{alpha, omega, fx};
}

bool try_linearized_ls(std::span<const double> x, std::span<const double> z,
                       std::span<const double> w, LinearizedFit* out) {
    const int n = static_cast<int>(x.size());
    std::vector<double> a(static_cast<size_t>(n) * 3);
    std::vector<double> b(x.begin(), x.end());
    for (int i = 0; i < n; ++i) {
        a[i] = 1.0;
        a[n + i] = z[i];
        a[2 * n + i] = w[i];
    }
    double coef[3];
    if (!qr_lstsq(a, b, n, 3, coef)) return false;
    double rss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = x[i] - (coef[0] + coef[1] * z[i] + coef[2] * w[i]);
        rss += r * r;
    }
    *out = LinearizedFit{coef[0], coef[1], coef[2], rss};
    return true;
}

LinearizedFit linearized_ls(std::span<const double> x, std::span<const double> z,
                            std::span<const double> w) {
    if (x.size() < 3 || z.size() != x.size() || w.size() != x.size()) {
        throw config_error("linearized least squares needs >= 3 equal-length samples");
    }
    LinearizedFit fit;
    if (!try_linearized_ls(x, z, w, &fit)) {
        throw fit_error("degenerate design in linearized least squares");
    }
    return fit;
}

RecoveredWave recover_wave(double intercept, double delta, double gamma, double alpha) {
    const double amp = std::hypot(delta, gamma);
    const double phi = std::atan2(-gamma, delta);
    return RecoveredWave{intercept, amp, wrap_angle(alpha + phi)};
}

NonnegFit nonneg_joint_ls(std::span<const double> x,
                          const std::vector<std::vector<double>>& phi) {
    const size_t n = x.size();
    const size_t m = phi.size();
    if (n < m + 2) {
        throw config_error("nonnegative joint fit needs more observations than coefficients");
    }
    for (const auto& col : phi) {
        if (col.size() != n) throw config_error("design column length mismatch");
    }

    double xbar = 0.0;
    for (double v : x) xbar += v;
    xbar /= static_cast<double>(n);

    double scale = 0.0;
    for (double v : x) scale = std::max(scale, std::abs(v));
    const double kkt_tol = 1e-12 * static_cast<double>(n) * (scale + 1.0);

    std::vector<double> amps(m, 0.0);
    double intercept = xbar;
    std::vector<size_t> passive;
    std::vector<char> in_passive(m, 0);
    std::vector<double> resid(n);

    auto refresh_resid = [&]() {
        for (size_t i = 0; i < n; ++i) {
            double v = x[i] - intercept;
            for (size_t j : passive) v -= amps[j] * phi[j][i];
            resid[i] = v;
        }
    };

    // Solves the unconstrained LS on [1, phi_passive]; mu/out sized 1+|P|.
    auto solve_passive = [&](double* mu, std::vector<double>& a_out) {
        const size_t k = passive.size() + 1;
        std::vector<double> a(n * k);
        std::vector<double> b(x.begin(), x.end());
        for (size_t i = 0; i < n; ++i) a[i] = 1.0;
        for (size_t c = 0; c < passive.size(); ++c) {
            const auto& col = phi[passive[c]];
            std::copy(col.begin(), col.end(), a.begin() + (c + 1) * n);
        }
        std::vector<double> coef(k);
        if (!qr_lstsq(a, b, static_cast<int>(n), static_cast<int>(k), coef.data())) {
            throw fit_error("degenerate design in nonnegative joint fit");
        }
        *mu = coef[0];
        a_out.assign(coef.begin() + 1, coef.end());
    };

    const int max_outer = static_cast<int>(3 * m) + 10;
    for (int outer = 0; outer < max_outer; ++outer) {
        refresh_resid();
        // KKT: every zeroed amplitude must have a nonpositive descent direction.
        double wmax = kkt_tol;
        size_t jmax = m;
        for (size_t j = 0; j < m; ++j) {
            if (in_passive[j]) continue;
            double dot = 0.0;
            for (size_t i = 0; i < n; ++i) dot += phi[j][i] * resid[i];
            if (dot > wmax) {
                wmax = dot;
                jmax = j;
            }
        }
        if (jmax == m) break;
        passive.push_back(jmax);
        in_passive[jmax] = 1;

        for (int inner = 0; inner < max_outer; ++inner) {
            double mu = 0.0;
            std::vector<double> trial;
            solve_passive(&mu, trial);
            bool feasible = true;
            double step = 1.0;
            for (size_t c = 0; c < passive.size(); ++c) {
                if (trial[c] <= 0.0) {
                    feasible = false;
                    const double cur = amps[passive[c]];
                    const double t = cur / (cur - trial[c]);
                    step = std::min(step, t);
                }
            }
            if (feasible) {
                for (size_t c = 0; c < passive.size(); ++c) amps[passive[c]] = trial[c];
                intercept = mu;
                break;
            }
            for (size_t c = 0; c < passive.size(); ++c) {
                const size_t j = passive[c];
                amps[j] += step * (trial[c] - amps[j]);
            }
            intercept += step * (mu - intercept);
            // Drop every amplitude the step drove to (or past) zero.
            std::vector<size_t> kept;
            for (size_t j : passive) {
                if (amps[j] > 1e-14 * (scale + 1.0)) {
                    kept.push_back(j);
                } else {
                    amps[j] = 0.0;
                    in_passive[j] = 0;
                }
            }
            passive.swap(kept);
        }
    }

    refresh_resid();
    double rss = 0.0;
    for (double r : resid) rss += r * r;
    return NonnegFit{intercept, std::move(amps), rss};
}

}  // namespace fmm
