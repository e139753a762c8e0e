// fmm: fit, simulate and inspect frequency modulated Mobius signal models
// from the command line. Talks to the library strictly through the C API.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fmm/fmm.h"
#include "svg.hpp"

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

int fail(fmm_status st) {
    std::fprintf(stderr, "error: %s\n", fmm_last_error());
    return static_cast<int>(st);
}

int fail_config(const std::string& msg) {
    std::fprintf(stderr, "error: %s\n", msg.c_str());
    return 2;
}

struct SeriesDeleter {
    void operator()(fmm_series* s) const { fmm_series_free(s); }
};
struct ConfigDeleter {
    void operator()(fmm_config* c) const { fmm_config_free(c); }
};
struct FitDeleter {
    void operator()(fmm_fit* f) const { fmm_fit_free(f); }
};
using SeriesPtr = std::unique_ptr<fmm_series, SeriesDeleter>;
using ConfigPtr = std::unique_ptr<fmm_config, ConfigDeleter>;
using FitPtr = std::unique_ptr<fmm_fit, FitDeleter>;

std::string take_string(char* s) {
    std::string out(s ? s : "");
    fmm_string_free(s);
    return out;
}

bool write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) return false;
    f << content;
    return f.good();
}

bool read_file(const std::string& path, std::string* out) {
    std::ifstream f(path, std::ios::binary);
    if (!f) return false;
    std::ostringstream buf;
    buf << f.rdbuf();
    *out = buf.str();
    return true;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct GenerateArgs {
    double intercept = 0.0;
    std::vector<double> amp, alpha, beta, omega;
    double from = 0.0;
    double to = kTwoPi;
    std::size_t length_out = 100;
    std::vector<double> time_points;
    double sigma_noise = 0.0;
    std::uint64_t seed = 0;
    bool has_seed = false;
    std::string out_path;
};

int run_generate(const GenerateArgs& a) {
    fmm_gen_spec spec;
    fmm_gen_spec_init(&spec);
    spec.intercept = a.intercept;
    spec.amp = a.amp.data();
    spec.amp_len = a.amp.size();
    spec.alpha = a.alpha.data();
    spec.alpha_len = a.alpha.size();
    spec.beta = a.beta.data();
    spec.beta_len = a.beta.size();
    spec.omega = a.omega.data();
    spec.omega_len = a.omega.size();
    spec.from_t = a.from;
    spec.to_t = a.to;
    spec.length_out = a.length_out;
    if (!a.time_points.empty()) {
        spec.time_points = a.time_points.data();
        spec.time_points_len = a.time_points.size();
    }
    spec.sigma_noise = a.sigma_noise;
    spec.seed = a.seed;
    spec.has_seed = a.has_seed ? 1 : 0;

    fmm_series* raw = nullptr;
    if (fmm_status st = fmm_generate(&spec, &raw); st != FMM_OK) return fail(st);
    SeriesPtr series(raw);

    char* csv = nullptr;
    if (fmm_status st = fmm_series_to_csv(series.get(), &csv); st != FMM_OK) return fail(st);
    const std::string text = take_string(csv);
    if (a.out_path.empty()) {
        std::fputs(text.c_str(), stdout);
    } else if (!write_file(a.out_path, text)) {
        std::fprintf(stderr, "error: cannot write '%s'\n", a.out_path.c_str());
        return 3;
    }
    return 0;
}

struct FitArgs {
    std::string input;
    int n_periods = 1;
    double period = 0.0;
    double t0 = 0.0;
    std::size_t nback = 1;
    std::vector<int> beta_restrictions;
    std::vector<int> omega_restrictions;
    std::size_t maxiter = 0;  // 0: nback
    std::string stop = "maxiter";
    std::size_t alpha_grid = 48;
    std::size_t omega_grid = 24;
    std::size_t num_reps = 3;
    bool parallel = false;
    std::string out_path;
    std::string export_fitted;
    std::string export_components;
    bool quiet = false;
};

int run_fit(const FitArgs& a) {
    fmm_series* sraw = nullptr;
    if (fmm_status st = fmm_series_read_csv(a.input.c_str(), a.n_periods, a.period, a.t0, &sraw);
        st != FMM_OK)
        return fail(st);
    SeriesPtr series(sraw);

    fmm_config* craw = nullptr;
    if (fmm_status st = fmm_config_create(a.nback, &craw); st != FMM_OK) return fail(st);
    ConfigPtr cfg(craw);
    if (fmm_status st = fmm_config_set_grid(cfg.get(), a.alpha_grid, a.omega_grid, a.num_reps);
        st != FMM_OK)
        return fail(st);
    if (a.maxiter > 0) {
        if (fmm_status st = fmm_config_set_max_iter(cfg.get(), a.maxiter); st != FMM_OK)
            return fail(st);
    }
    if (a.stop == "maxiter") {
        fmm_config_set_stop_always_false(cfg.get());
    } else if (a.stop.rfind("r2:", 0) == 0) {
        char* end = nullptr;
        const std::string num = a.stop.substr(3);
        const double dif_max = std::strtod(num.c_str(), &end);
        if (num.empty() || end != num.c_str() + num.size()) {
            return fail_config("--stop r2:<difMax> needs a numeric difMax");
        }
        if (fmm_status st = fmm_config_set_stop_r2(cfg.get(), dif_max); st != FMM_OK)
            return fail(st);
    } else {
        return fail_config("--stop must be 'maxiter' or 'r2:<difMax>'");
    }
    if (!a.beta_restrictions.empty()) {
        if (fmm_status st = fmm_config_set_beta_restrictions(
                cfg.get(), a.beta_restrictions.data(), a.beta_restrictions.size());
            st != FMM_OK)
            return fail(st);
    }
    if (!a.omega_restrictions.empty()) {
        if (fmm_status st = fmm_config_set_omega_restrictions(
                cfg.get(), a.omega_restrictions.data(), a.omega_restrictions.size());
            st != FMM_OK)
            return fail(st);
    }
    fmm_config_set_parallel(cfg.get(), a.parallel ? 1 : 0);

    fmm_fit* fraw = nullptr;
    const auto fit_start = std::chrono::steady_clock::now();
    if (fmm_status st = fmm_fit_series(series.get(), cfg.get(), &fraw); st != FMM_OK)
        return fail(st);
    FitPtr fit(fraw);
    const double fit_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - fit_start).count();

    if (!a.quiet) {
        if (fmm_fit_stopped_by_rule(fit.get())) {
            std::fprintf(stderr, "Stopped by the stopFunction ( %zu iterations )\n",
                         fmm_fit_iterations(fit.get()));
        } else {
            std::fprintf(stderr, "Stopped by reaching maximum iterations ( %zu iterations )\n",
                         fmm_fit_iterations(fit.get()));
        }
        std::fprintf(stderr, "R-squared: %.4f (fitted in %.3f s)\n",
                     fmm_fit_r2_total(fit.get()), fit_seconds);
    }

    char* json = nullptr;
    if (fmm_status st = fmm_fit_to_json(fit.get(), &json); st != FMM_OK) return fail(st);
    const std::string text = take_string(json);
    if (a.out_path.empty()) {
        std::fputs(text.c_str(), stdout);
    } else if (!write_file(a.out_path, text)) {
        std::fprintf(stderr, "error: cannot write '%s'\n", a.out_path.c_str());
        return 3;
    }

    if (!a.export_fitted.empty()) {
        char* csv = nullptr;
        if (fmm_status st = fmm_fit_fitted_csv(fit.get(), &csv); st != FMM_OK) return fail(st);
        if (!write_file(a.export_fitted, take_string(csv))) {
            std::fprintf(stderr, "error: cannot write '%s'\n", a.export_fitted.c_str());
            return 3;
        }
    }
    if (!a.export_components.empty()) {
        char* csv = nullptr;
        if (fmm_status st = fmm_fit_components_csv(fit.get(), &csv); st != FMM_OK)
            return fail(st);
        if (!write_file(a.export_components, take_string(csv))) {
            std::fprintf(stderr, "error: cannot write '%s'\n", a.export_components.c_str());
            return 3;
        }
    }
    return 0;
}

struct PeaksArgs {
    std::string in_path;
    bool wrap = true;
};

int run_peaks(const PeaksArgs& a) {
    std::string text;
    if (!read_file(a.in_path, &text)) {
        std::fprintf(stderr, "error: cannot read '%s'\n", a.in_path.c_str());
        return 3;
    }
    fmm_fit* fraw = nullptr;
    if (fmm_status st = fmm_fit_from_json(text.c_str(), &fraw); st != FMM_OK) return fail(st);
    FitPtr fit(fraw);

    const std::size_t m = fmm_fit_wave_count(fit.get());
    std::vector<double> tU(m), zU(m), tL(m), zL(m);
    if (fmm_status st = fmm_fit_peaks(fit.get(), a.wrap ? 1 : 0, tU.data(), zU.data(),
                                      tL.data(), zL.data());
        st != FMM_OK)
        return fail(st);
    std::fputs("tU,ZU,tL,ZL\n", stdout);
    for (std::size_t j = 0; j < m; ++j) {
        std::fprintf(stdout, "%s,%s,%s,%s\n", fmt17(tU[j]).c_str(), fmt17(zU[j]).c_str(),
                     fmt17(tL[j]).c_str(), fmt17(zL[j]).c_str());
    }
    return 0;
}

struct PlotArgs {
    std::string in_path;
    std::string data_path;
    int n_periods = 1;
    double period = 0.0;
    double t0 = 0.0;
    std::string out_path;
    bool components = false;
};

int run_plot(const PlotArgs& a) {
    std::string text;
    if (!read_file(a.in_path, &text)) {
        std::fprintf(stderr, "error: cannot read '%s'\n", a.in_path.c_str());
        return 3;
    }
    fmm_fit* fraw = nullptr;
    if (fmm_status st = fmm_fit_from_json(text.c_str(), &fraw); st != FMM_OK) return fail(st);
    FitPtr fit(fraw);

    fmm_series* sraw = nullptr;
    if (fmm_status st = fmm_series_read_csv(a.data_path.c_str(), a.n_periods, a.period, a.t0, &sraw);
        st != FMM_OK)
        return fail(st);
    SeriesPtr series(sraw);

    const std::size_t n = fmm_series_size(series.get());
    if (fmm_fit_sample_count(fit.get()) != n) {
        std::fprintf(stderr,
                     "error: fit has %zu samples but the data file has %zu; they do not belong "
                     "together\n",
                     fmm_fit_sample_count(fit.get()), n);
        return 3;
    }
    const double* t = fmm_series_time_points(series.get());
    const double* y = fmm_series_values(series.get());
    std::vector<double> data_t(t, t + n), data_y(y, y + n);

    const std::size_t dense_n = 512;
    fmmtool::Curve fit_curve;
    fit_curve.x.resize(dense_n);
    fit_curve.y.resize(dense_n);
    const double lo = data_t.front(), hi = data_t.back();
    for (std::size_t i = 0; i < dense_n; ++i) {
        fit_curve.x[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(dense_n - 1);
    }
    if (fmm_status st = fmm_fit_model_values(fit.get(), fit_curve.x.data(), dense_n,
                                             fit_curve.y.data());
        st != FMM_OK)
        return fail(st);

    std::vector<fmmtool::Curve> comps;
    if (a.components) {
        const std::size_t m = fmm_fit_wave_count(fit.get());
        for (std::size_t j = 0; j < m; ++j) {
            fmmtool::Curve c;
            c.x = fit_curve.x;
            c.y.resize(dense_n);
            if (fmm_status st = fmm_fit_wave_values(fit.get(), j, c.x.data(), dense_n, c.y.data());
                st != FMM_OK)
                return fail(st);
            c.label = "Wave " + std::to_string(j + 1);
            comps.push_back(std::move(c));
        }
    }

    const std::string svg = fmmtool::render_plot_svg(data_t, data_y, fit_curve, comps);
    if (a.out_path.empty()) {
        std::fputs(svg.c_str(), stdout);
    } else if (!write_file(a.out_path, svg)) {
        std::fprintf(stderr, "error: cannot write '%s'\n", a.out_path.c_str());
        return 3;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FMM signal models: simulate, fit, and inspect oscillatory data"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(fmm_version()));
    app.footer("Exit codes: 0 success, 2 configuration error, 3 data/format error, 4 fit failure.");

    GenerateArgs gen;
    CLI::App* cgen = app.add_subcommand("generate", "Simulate data from an FMM model");
    cgen->add_option("--m", gen.intercept, "Intercept M")->required();
    cgen->add_option("--a", gen.amp, "Wave amplitudes (comma separated)")
        ->required()
        ->delimiter(',');
    cgen->add_option("--alpha", gen.alpha, "Wave alpha angles (comma separated)")
        ->required()
        ->delimiter(',');
    cgen->add_option("--beta", gen.beta, "Wave beta angles (comma separated)")
        ->required()
        ->delimiter(',');
    cgen->add_option("--omega", gen.omega, "Wave omega factors (comma separated)")
        ->required()
        ->delimiter(',');
    auto* ofrom = cgen->add_option("--from", gen.from, "First time point (default 0)");
    auto* oto = cgen->add_option("--to", gen.to, "Last time point (default 2pi)");
    auto* olen = cgen->add_option("--length-out", gen.length_out, "Number of samples (default 100)");
    auto* otp = cgen->add_option("--time-points", gen.time_points,
                                 "Explicit time points (comma separated)")
                    ->delimiter(',');
    otp->excludes(ofrom)->excludes(oto)->excludes(olen);
    cgen->add_option("--sigma-noise", gen.sigma_noise, "Gaussian noise std deviation (default 0)");
    auto* oseed = cgen->add_option("--seed", gen.seed, "Noise generator seed");
    cgen->add_option("--out", gen.out_path, "Output CSV path (default stdout)");

    FitArgs fita;
    CLI::App* cfit = app.add_subcommand("fit", "Fit an FMM model to a CSV time series");
    cfit->add_option("--input", fita.input, "Input CSV ('value' or 'time,value' header)")
        ->required();
    cfit->add_option("--n-periods", fita.n_periods, "Periods covered by the data (default 1)");
    cfit->add_option("--period", fita.period, "Period length of the raw time column");
    cfit->add_option("--t0", fita.t0, "Time origin of the raw time column (default 0)");
    cfit->add_option("--nback", fita.nback, "Number of FMM waves (default 1)");
    cfit->add_option("--beta-restrictions", fita.beta_restrictions,
                     "Equality block labels for beta, e.g. 1,1,2,2")
        ->delimiter(',');
    cfit->add_option("--omega-restrictions", fita.omega_restrictions,
                     "Equality block labels for omega, e.g. 1,1,2,2")
        ->delimiter(',');
    cfit->add_option("--maxiter", fita.maxiter, "Backfitting passes (default nback)");
    cfit->add_option("--stop", fita.stop, "'maxiter' or 'r2:<difMax>' (default maxiter)");
    cfit->add_option("--alpha-grid", fita.alpha_grid, "Alpha grid resolution (default 48)");
    cfit->add_option("--omega-grid", fita.omega_grid, "Omega grid resolution (default 24)");
    cfit->add_option("--num-reps", fita.num_reps, "Grid refinement repetitions (default 3)");
    cfit->add_flag("--parallel", fita.parallel, "Parallelize the grid searches");
    cfit->add_option("--out", fita.out_path, "Output JSON path (default stdout)");
    cfit->add_option("--export-fitted", fita.export_fitted, "Write 'timePoints,fitted' CSV here");
    cfit->add_option("--export-components", fita.export_components,
                     "Write per-wave component CSV here");
    cfit->add_flag("--quiet", fita.quiet, "Suppress progress lines on stderr");

    PeaksArgs peaks;
    CLI::App* cpeaks = app.add_subcommand("peaks", "Print per-wave peak/trough times and signals");
    cpeaks->add_option("--in", peaks.in_path, "Fit JSON produced by 'fit'")->required();
    cpeaks->add_flag("--wrap-2pi,!--no-wrap-2pi", peaks.wrap,
                     "Wrap times into [0, 2pi) (default on)");

    PlotArgs plot;
    CLI::App* cplot = app.add_subcommand("plot", "Render a fit as a static SVG");
    cplot->add_option("--in", plot.in_path, "Fit JSON produced by 'fit'")->required();
    cplot->add_option("--data", plot.data_path, "Original input CSV")->required();
    cplot->add_option("--n-periods", plot.n_periods, "Periods covered by the data (default 1)");
    cplot->add_option("--period", plot.period, "Period length of the raw time column");
    cplot->add_option("--t0", plot.t0, "Time origin of the raw time column (default 0)");
    cplot->add_flag("--components", plot.components, "Also draw the centered per-wave curves");
    cplot->add_option("--out", plot.out_path, "Output SVG path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        app.exit(e);
        return 2;
    }

    gen.has_seed = oseed->count() > 0;
    if (cgen->parsed()) return run_generate(gen);
    if (cfit->parsed()) return run_fit(fita);
    if (cpeaks->parsed()) return run_peaks(peaks);
    if (cplot->parsed()) return run_plot(plot);
    return 2;
}
