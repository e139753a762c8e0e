#include "fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "optimize.hpp"

namespace fmm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double total_ss(std::span<const double> v) {
    const double m = mean_of(v);
    double tss = 0.0;
    for (double x : v) tss += (x - m) * (x - m);
    return tss;
}

// Profiled RSS of a single wave at fixed (alpha, omega): the intercept,
// amplitude and skew are concentrated out through the linearized solve.
// alpha is wrapped before evaluation so equal angles mod 2pi score
// bit-identically. Returns +inf on a rank-deficient cell.
double profiled_rss(std::span<const double> t, std::span<const double> x,
                    double alpha, double omega) {
    const double a = wrap_angle(alpha);
    const size_t n = t.size();
    std::vector<double> z(n), w(n);
    for (size_t i = 0; i < n; ++i) {
        const double half = 0.5 * (t[i] - a);
        const double tstar = a + 2.0 * std::atan2(omega * std::sin(half), std::cos(half));
        z[i] = std::cos(tstar);
        w[i] = std::sin(tstar);
    }
    LinearizedFit lf;
    if (!try_linearized_ls(x, z, w, &lf)) return kInf;
    return lf.rss;
}

struct MonoFit {
    double intercept = 0.0;
    Wave wave;
    double rss = 0.0;
};

struct WaveSearch {
    int alpha_count = 48;
    int omega_count = 24;
    int num_reps = 3;
    bool parallel_grid = false;
};

// Grid search over (alpha, omega) with num_reps - 1 refinements around the
// incumbent, then a Nelder-Mead polish, then the linearized solve at the
// winner. seed, when present, is scored first so a refit can never fall
// behind the wave it replaces.
MonoFit fit_single_wave(std::span<const double> t, std::span<const double> x,
                        const WaveSearch& search, std::optional<double> omega_fixed,
                        std::optional<GridResult> seed, std::int64_t* eval_count) {
    auto objective = [&](double alpha, double omega) {
        return profiled_rss(t, x, alpha, omega);
    };

    GridResult best{0.0, 0.0, kInf};
    bool have_best = false;
    if (seed) {
        const double om = omega_fixed.value_or(seed->omega);
        const double f = objective(seed->alpha, om);
        if (std::isfinite(f)) {
            best = GridResult{wrap_angle(seed->alpha), om, f};
            have_best = true;
        }
    }

    GridSpec spec;
    spec.alpha_count = search.alpha_count;
    spec.alpha_lo = 0.0;
    spec.alpha_hi = kTwoPi;
    spec.alpha_closed = false;
    if (omega_fixed) {
        spec.omega_count = 1;
        spec.omega_lo = spec.omega_hi = *omega_fixed;
    } else {
        spec.omega_count = search.omega_count;
        spec.omega_lo = kOmegaFloor;
        spec.omega_hi = 1.0;
    }

    double alpha_step = kTwoPi / search.alpha_count;
    double omega_step = omega_fixed ? 0.0
                                    : (spec.omega_hi - spec.omega_lo) /
                                          std::max(1, spec.omega_count - 1);
    for (int rep = 0; rep < search.num_reps; ++rep) {
        if (rep > 0) {
            spec.alpha_lo = best.alpha - alpha_step;
            spec.alpha_hi = best.alpha + alpha_step;
            spec.alpha_closed = true;
            alpha_step = (spec.alpha_hi - spec.alpha_lo) / std::max(1, spec.alpha_count - 1);
            if (!omega_fixed) {
                spec.omega_lo = std::max(kOmegaFloor, best.omega - omega_step);
                spec.omega_hi = std::min(1.0, best.omega + omega_step);
                omega_step = (spec.omega_hi - spec.omega_lo) / std::max(1, spec.omega_count - 1);
            }
        }
        try {
            const GridResult g = grid_minimize(objective, spec, search.parallel_grid, eval_count);
            if (!have_best || g.rss < best.rss) {
                best = g;
                have_best = true;
            }
        } catch (const fit_error&) {
            if (!have_best) throw;
            break;
        }
    }

    SimplexConfig scfg;
    if (omega_fixed) {
        auto obj1 = [&](const std::vector<double>& v) { return objective(v[0], *omega_fixed); };
        const SimplexResult r = nelder_mead(obj1, {best.alpha}, {std::max(alpha_step, 1e-9)}, scfg);
        const double a = wrap_angle(r.x[0]);
        const double f = objective(a, *omega_fixed);
        if (f < best.rss) best = GridResult{a, *omega_fixed, f};
    } else {
        const GridResult nm = minimize_alpha_omega(objective, best.alpha, best.omega,
                                                   std::max(alpha_step, 1e-9),
                                                   std::max(omega_step, 1e-9), scfg);
        if (nm.rss < best.rss) best = nm;
    }

    const double alpha = wrap_angle(best.alpha);
    const double omega = best.omega;
    const size_t n = t.size();
    std::vector<double> z(n), w(n);
    for (size_t i = 0; i < n; ++i) {
        const double half = 0.5 * (t[i] - alpha);
        const double tstar = alpha + 2.0 * std::atan2(omega * std::sin(half), std::cos(half));
        z[i] = std::cos(tstar);
        w[i] = std::sin(tstar);
    }
    const LinearizedFit lf = linearized_ls(x, z, w);
    const RecoveredWave rec = recover_wave(lf.intercept, lf.delta, lf.gamma, alpha);
    return MonoFit{rec.intercept, Wave{rec.amp, alpha, rec.beta, omega}, lf.rss};
}

std::vector<int> identity_blocks(int nback) {
    std::vector<int> v(static_cast<size_t>(nback));
    std::iota(v.begin(), v.end(), 1);
    return v;
}

FitConfig normalized_config(const FitConfig& in) {
    FitConfig cfg = in;
    if (cfg.nback < 1) throw config_error("nback must be >= 1");
    if (cfg.length_alpha_grid < 2 || cfg.length_omega_grid < 2) {
        throw config_error("grid lengths must be >= 2");
    }
    if (cfg.num_reps < 1) throw config_error("num_reps must be >= 1");
    if (cfg.maxiter == 0) cfg.maxiter = cfg.nback;
    if (cfg.maxiter < 1) throw config_error("maxiter must be >= 1");
    if (cfg.stop_rule == StopRule::R2Delta && !(cfg.dif_max > 0.0)) {
        throw config_error("the R2 stop rule needs dif_max > 0");
    }
    if (cfg.beta_blocks.empty()) cfg.beta_blocks = identity_blocks(cfg.nback);
    if (cfg.omega_blocks.empty()) cfg.omega_blocks = identity_blocks(cfg.nback);
    auto check_blocks = [&](const std::vector<int>& blocks, const char* name) {
        if (blocks.size() != static_cast<size_t>(cfg.nback)) {
            throw config_error(std::string(name) + " restriction vector must have length nback");
        }
        for (int label : blocks) {
            if (label < 1) throw config_error(std::string(name) + " restriction labels must be positive");
        }
    };
    check_blocks(cfg.beta_blocks, "beta");
    check_blocks(cfg.omega_blocks, "omega");
    return cfg;
}

// Wave indices grouped by label, groups ordered by first appearance.
std::vector<std::vector<size_t>> group_by_label(const std::vector<int>& labels) {
    std::vector<std::vector<size_t>> groups;
    std::vector<int> seen;
    for (size_t j = 0; j < labels.size(); ++j) {
        const auto it = std::find(seen.begin(), seen.end(), labels[j]);
        if (it == seen.end()) {
            seen.push_back(labels[j]);
            groups.push_back({j});
        } else {
            groups[static_cast<size_t>(it - seen.begin())].push_back(j);
        }
    }
    return groups;
}

struct BlockCandidate {
    double omega = 0.0;
    double rss = kInf;
    std::vector<Wave> waves;
    std::vector<std::vector<double>> values;
    std::int64_t evals = 0;
};

// Greedy incremental attribution over per-wave contribution columns; the
// subset intercept is profiled (mean of the leftover), which matches the
// zero-sum residuals of the joint fit at the full set.
std::vector<double> attribute_impl(std::span<const double> x,
                                   const std::vector<std::vector<double>>& contrib,
                                   double tss) {
    const size_t m = contrib.size();
    const size_t n = x.size();
    std::vector<char> selected(m, 0);
    std::vector<double> base(n, 0.0);
    std::vector<double> out(m, 0.0);
    double cum = 0.0;
    for (size_t round = 0; round < m; ++round) {
        double best_r2 = -kInf;
        size_t best_j = m;
        for (size_t j = 0; j < m; ++j) {
            if (selected[j]) continue;
            double mu = 0.0;
            for (size_t i = 0; i < n; ++i) mu += x[i] - base[i] - contrib[j][i];
            mu /= static_cast<double>(n);
            double sse = 0.0;
            for (size_t i = 0; i < n; ++i) {
                const double r = x[i] - base[i] - contrib[j][i] - mu;
                sse += r * r;
            }
            const double r2 = 1.0 - sse / tss;
            if (r2 > best_r2) {
                best_r2 = r2;
                best_j = j;
            }
        }
        selected[best_j] = 1;
        for (size_t i = 0; i < n; ++i) base[i] += contrib[best_j][i];
        out[best_j] = best_r2 - cum;
        cum = best_r2;
    }
    return out;
}

FitResult run_pipeline(const TimeSeries& data, const FitConfig& cfg_in,
                       std::optional<double> omega_fixed) {
    const FitConfig cfg = normalized_config(cfg_in);
    const std::vector<double>& t = data.time_points;
    const std::vector<double>& x = data.values;
    const size_t n = x.size();
    const size_t m = static_cast<size_t>(cfg.nback);

    if (t.size() != n) throw config_error("time point and value lengths differ");
    if (n < 4 * m + 1) {
        throw config_error("need at least 4 observations per wave plus one (n >= " +
                           std::to_string(4 * m + 1) + ", got " + std::to_string(n) + ")");
    }
    for (size_t i = 1; i < n; ++i) {
        if (!(t[i] > t[i - 1])) throw config_error("time points must be strictly increasing");
    }
    if (omega_fixed && !(*omega_fixed >= kOmegaFloor && *omega_fixed <= 1.0)) {
        throw config_error("fixed omega must lie in [1e-3, 1]");
    }

    const double tss = total_ss(x);
    if (!(tss > 0.0)) {
        throw fit_error("data variance is zero; R-squared is undefined");
    }

    const WaveSearch search{cfg.length_alpha_grid, cfg.length_omega_grid, cfg.num_reps,
                            cfg.parallelize};
    const auto omega_groups = group_by_label(cfg.omega_blocks);
    bool omega_restricted = false;
    for (const auto& g : omega_groups) {
        if (g.size() > 1) omega_restricted = true;
    }

    std::vector<Wave> waves(m);
    std::vector<char> have(m, 0);
    std::vector<std::vector<double>> wfit(m, std::vector<double>(n, 0.0));
    std::int64_t grid_evals = 0;

    auto partial_residual = [&](size_t skip, std::vector<double>& out) {
        out.assign(x.begin(), x.end());
        for (size_t j = 0; j < m; ++j) {
            if (j == skip) continue;
            for (size_t i = 0; i < n; ++i) out[i] -= wfit[j][i];
        }
    };

    // Shared-omega update of one restriction block: every candidate omega is
    // scored by one inner backfitting sweep of the block's waves against the
    // block residual, and the best sweep is committed.
    auto update_block = [&](const std::vector<size_t>& group) {
        std::vector<double> block_resid(x.begin(), x.end());
        for (size_t j = 0; j < m; ++j) {
            if (std::find(group.begin(), group.end(), j) != group.end()) continue;
            for (size_t i = 0; i < n; ++i) block_resid[i] -= wfit[j][i];
        }

        WaveSearch inner = search;
        inner.parallel_grid = false;  // parallelism lives at the candidate level here

        auto evaluate = [&](double omega_c) {
            BlockCandidate cand;
            cand.omega = omega_c;
            cand.waves.resize(group.size());
            cand.values.assign(group.size(), std::vector<double>(n, 0.0));
            for (size_t g = 0; g < group.size(); ++g) {
                if (have[group[g]]) cand.values[g] = wfit[group[g]];
            }
            std::vector<double> r(n);
            for (size_t g = 0; g < group.size(); ++g) {
                const size_t j = group[g];
                r = block_resid;
                for (size_t other = 0; other < group.size(); ++other) {
                    if (other == g) continue;
                    for (size_t i = 0; i < n; ++i) r[i] -= cand.values[other][i];
                }
                std::optional<GridResult> seed;
                if (have[j]) seed = GridResult{waves[j].alpha, omega_c, 0.0};
                const MonoFit mf = fit_single_wave(t, r, inner, omega_c, seed, &cand.evals);
                cand.waves[g] = mf.wave;
                for (size_t i = 0; i < n; ++i) cand.values[g][i] = wave_value(t[i], mf.wave);
            }
            std::vector<double> left(n);
            for (size_t i = 0; i < n; ++i) {
                left[i] = block_resid[i];
                for (size_t g = 0; g < group.size(); ++g) left[i] -= cand.values[g][i];
            }
            const double mu = mean_of(left);
            double rss = 0.0;
            for (double v : left) rss += (v - mu) * (v - mu);
            cand.rss = rss;
            return cand;
        };

        BlockCandidate best;
        auto consider = [&](BlockCandidate&& c) {
            grid_evals += c.evals;
            c.evals = 0;
            if (c.rss < best.rss) best = std::move(c);
        };

        if (have[group[0]]) consider(evaluate(waves[group[0]].omega));

        double lo = kOmegaFloor, hi = 1.0;
        const int count = cfg.length_omega_grid;
        double step = (hi - lo) / (count - 1);
        for (int rep = 0; rep < cfg.num_reps; ++rep) {
            if (rep > 0) {
                lo = std::max(kOmegaFloor, best.omega - step);
                hi = std::min(1.0, best.omega + step);
                step = (hi - lo) / (count - 1);
            }
            std::vector<double> cands(static_cast<size_t>(count));
            for (int c = 0; c < count; ++c) cands[static_cast<size_t>(c)] = lo + step * c;

            std::vector<BlockCandidate> results(cands.size());
            if (cfg.parallelize && cands.size() >= 4) {
                unsigned n_threads = std::min(std::thread::hardware_concurrency(), 16u);
                if (n_threads == 0) n_threads = 1;
                std::vector<std::thread> workers;
                const size_t chunk = (cands.size() + n_threads - 1) / n_threads;
                for (unsigned w = 0; w < n_threads; ++w) {
                    const size_t clo = std::min(cands.size(), w * chunk);
                    const size_t chi = std::min(cands.size(), clo + chunk);
                    if (clo < chi) {
                        workers.emplace_back([&, clo, chi]() {
                            for (size_t idx = clo; idx < chi; ++idx) {
                                results[idx] = evaluate(cands[idx]);
                            }
                        });
                    }
                }
                for (auto& w : workers) w.join();
            } else {
                for (size_t idx = 0; idx < cands.size(); ++idx) results[idx] = evaluate(cands[idx]);
            }
            for (auto& r : results) consider(std::move(r));  // index order: ties keep smaller omega
        }

        auto nm_obj = [&](const std::vector<double>& v) {
            if (v[0] < kOmegaFloor || v[0] > 1.0) return kInf;
            BlockCandidate c = evaluate(v[0]);
            const double rss = c.rss;
            consider(std::move(c));
            return rss;
        };
        nelder_mead(nm_obj, {best.omega}, {std::max(step, 1e-9)}, SimplexConfig{});

        for (size_t g = 0; g < group.size(); ++g) {
            const size_t j = group[g];
            waves[j] = best.waves[g];
            wfit[j] = best.values[g];
            have[j] = 1;
        }
    };

    std::vector<double> r2_trace;
    double r2_prev = 0.0;
    bool stopped_by_rule = false;
    int iterations = 0;
    std::vector<double> resid_buf(n);

    for (int pass = 1; pass <= cfg.maxiter; ++pass) {
        if (omega_restricted) {
            for (const auto& group : omega_groups) update_block(group);
        } else {
            for (size_t j = 0; j < m; ++j) {
                partial_residual(j, resid_buf);
                std::optional<GridResult> seed;
                if (have[j]) seed = GridResult{waves[j].alpha, waves[j].omega, 0.0};
                const MonoFit mf =
                    fit_single_wave(t, resid_buf, search, omega_fixed, seed, &grid_evals);
                waves[j] = mf.wave;
                have[j] = 1;
                for (size_t i = 0; i < n; ++i) wfit[j][i] = wave_value(t[i], waves[j]);
            }
        }

        double mu = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double s = x[i];
            for (size_t j = 0; j < m; ++j) s -= wfit[j][i];
            resid_buf[i] = s;
            mu += s;
        }
        mu /= static_cast<double>(n);
        double sse = 0.0;
        for (double v : resid_buf) sse += (v - mu) * (v - mu);
        const double r2 = 1.0 - sse / tss;
        r2_trace.push_back(r2);
        iterations = pass;
        if (cfg.stop_rule == StopRule::R2Delta && r2 - r2_prev <= cfg.dif_max) {
            stopped_by_rule = true;
            break;
        }
        r2_prev = r2;
    }

    // Equality blocks on beta: replace each block's estimates by their
    // angular mean, then let the joint fit below redo M and the amplitudes.
    for (const auto& group : group_by_label(cfg.beta_blocks)) {
        if (group.size() < 2) continue;
        std::vector<double> betas;
        betas.reserve(group.size());
        for (size_t j : group) betas.push_back(waves[j].beta);
        const double shared = angular_mean(betas);
        for (size_t j : group) waves[j].beta = shared;
    }

    // Joint fit of the intercept and all amplitudes with the phases frozen.
    std::vector<std::vector<double>> phi(m, std::vector<double>(n));
    for (size_t j = 0; j < m; ++j) {
        for (size_t i = 0; i < n; ++i) {
            phi[j][i] = std::cos(mobius_phase(t[i], waves[j].alpha, waves[j].beta, waves[j].omega));
        }
    }
    const NonnegFit joint = nonneg_joint_ls(x, phi);

    Model model;
    model.intercept = joint.intercept;
    model.waves.reserve(m);
    std::vector<std::vector<double>> contrib(m, std::vector<double>(n));
    for (size_t j = 0; j < m; ++j) {
        model.waves.push_back(Wave{joint.coefs[j], waves[j].alpha, waves[j].beta, waves[j].omega});
        for (size_t i = 0; i < n; ++i) contrib[j][i] = joint.coefs[j] * phi[j][i];
    }

    // Label waves in decreasing order of attributed R2.
    std::vector<double> attribution = attribute_impl(x, contrib, tss);
    std::vector<size_t> order(m);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return attribution[a] > attribution[b]; });

    FitResult res;
    res.model.intercept = model.intercept;
    res.time_points = t;
    res.r2_per_wave.reserve(m);
    std::vector<std::vector<double>> ordered_contrib;
    ordered_contrib.reserve(m);
    for (size_t j : order) {
        res.model.waves.push_back(model.waves[j]);
        res.r2_per_wave.push_back(attribution[j]);
        ordered_contrib.push_back(std::move(contrib[j]));
    }

    res.fitted_values.assign(n, res.model.intercept);
    for (size_t j = 0; j < m; ++j) {
        for (size_t i = 0; i < n; ++i) res.fitted_values[i] += ordered_contrib[j][i];
    }
    res.residuals.resize(n);
    res.sse = 0.0;
    for (size_t i = 0; i < n; ++i) {
        res.residuals[i] = x[i] - res.fitted_values[i];
        res.sse += res.residuals[i] * res.residuals[i];
    }
    res.r2_total = 1.0 - res.sse / tss;
    res.n_iter = iterations;
    res.stopped_by_rule = stopped_by_rule;
    res.peaks = model_peaks(res.model, true);
    res.r2_trace = std::move(r2_trace);
    res.grid_evaluations = grid_evals;
    return res;
}

}  // namespace

double r_squared(std::span<const double> data, std::span<const double> fitted) {
    if (data.size() != fitted.size() || data.size() < 2) {
        throw config_error("r_squared needs two equal-length series of size >= 2");
    }
    const double tss = total_ss(data);
    if (!(tss > 0.0)) {
        throw fit_error("data variance is zero; R-squared is undefined");
    }
    double sse = 0.0;
    for (size_t i = 0; i < data.size(); ++i) {
        const double r = data[i] - fitted[i];
        sse += r * r;
    }
    return 1.0 - sse / tss;
}

double angular_mean(std::span<const double> angles) {
    if (angles.empty()) throw config_error("angular mean of an empty set");
    double s = 0.0, c = 0.0;
    for (double a : angles) {
        s += std::sin(a);
        c += std::cos(a);
    }
    s /= static_cast<double>(angles.size());
    c /= static_cast<double>(angles.size());
    if (std::hypot(s, c) < 1e-9) {
        throw fit_error("angular mean undefined: resultant length is (near) zero");
    }
    return wrap_angle(std::atan2(s, c));
}

FitResult fit_mono(const TimeSeries& data, const FitConfig& cfg,
                   std::optional<double> omega_fixed) {
    FitConfig mono = cfg;
    mono.nback = 1;
    mono.maxiter = 1;
    mono.beta_blocks.clear();
    mono.omega_blocks.clear();
    mono.stop_rule = StopRule::AlwaysFalse;
    return run_pipeline(data, mono, omega_fixed);
}

FitResult fit_multi(const TimeSeries& data, const FitConfig& cfg) {
    FitConfig plain = cfg;
    plain.beta_blocks.clear();
    plain.omega_blocks.clear();
    return run_pipeline(data, plain, std::nullopt);
}

FitResult fit_restricted(const TimeSeries& data, const FitConfig& cfg) {
    return run_pipeline(data, cfg, std::nullopt);
}

std::vector<double> attribute_wave_r2(const TimeSeries& data, const Model& model) {
    const size_t n = data.size();
    if (data.time_points.size() != n) throw config_error("time point and value lengths differ");
    const double tss = total_ss(data.values);
    if (!(tss > 0.0)) throw fit_error("data variance is zero; R-squared is undefined");
    std::vector<std::vector<double>> contrib(model.waves.size(), std::vector<double>(n));
    for (size_t j = 0; j < model.waves.size(); ++j) {
        for (size_t i = 0; i < n; ++i) contrib[j][i] = wave_value(data.time_points[i], model.waves[j]);
    }
    return attribute_impl(data.values, contrib, tss);
}

}  // namespace fmm
