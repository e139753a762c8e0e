#include "fmm/fmm.h"

#include <cstring>
#include <fstream>
#include <memory>
#include <new>

#include "fit.hpp"
#include "generate.hpp"
#include "result_io.hpp"
#include "timeseries.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

fmm_status translate_exception() {
    try {
        throw;
    } catch (const fmm::config_error& e) {
        set_error(e.what());
        return FMM_ERROR_CONFIG;
    } catch (const fmm::format_error& e) {
        set_error(e.what());
        return FMM_ERROR_FORMAT;
    } catch (const fmm::fit_error& e) {
        set_error(e.what());
        return FMM_ERROR_FIT;
    } catch (const std::bad_alloc&) {
        set_error("out of memory");
        return FMM_ERROR_INTERNAL;
    } catch (const std::exception& e) {
        set_error(e.what());
        return FMM_ERROR_INTERNAL;
    } catch (...) {
        set_error("unknown error");
        return FMM_ERROR_INTERNAL;
    }
}

template <typename Fn>
fmm_status guarded(Fn&& fn) {
    try {
        fn();
        return FMM_OK;
    } catch (...) {
        return translate_exception();
    }
}

fmm_status require(bool ok, const char* msg) {
    if (!ok) {
        set_error(msg);
        return FMM_ERROR_CONFIG;
    }
    return FMM_OK;
}

char* copy_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

struct fmm_series {
    fmm::TimeSeries ts;
};

struct fmm_config {
    fmm::FitConfig cfg;
};

struct fmm_fit {
    fmm::FitResult result;
};

extern "C" {

const char* fmm_version(void) { return "0.1.0"; }

const char* fmm_last_error(void) { return g_last_error.c_str(); }

void fmm_string_free(char* s) { delete[] s; }

fmm_status fmm_series_create(const double* time_points, const double* values, size_t n,
                             fmm_series** out) {
    if (fmm_status st = require(time_points && values && out && n > 0, "null argument"); st != FMM_OK)
        return st;
    return guarded([&] {
        auto s = std::make_unique<fmm_series>();
        s->ts.time_points.assign(time_points, time_points + n);
        s->ts.values.assign(values, values + n);
        for (size_t i = 1; i < n; ++i) {
            if (!(time_points[i] > time_points[i - 1])) {
                throw fmm::config_error("time points must be strictly increasing");
            }
        }
        *out = s.release();
    });
}

fmm_status fmm_series_read_csv(const char* path, int n_periods, double period, double t0,
                               fmm_series** out) {
    if (fmm_status st = require(path && out, "null argument"); st != FMM_OK) return st;
    return guarded([&] {
        fmm::CsvOptions opt;
        opt.n_periods = n_periods;
        opt.period = period;
        opt.t0 = t0;
        auto s = std::make_unique<fmm_series>();
        s->ts = fmm::read_csv(path, opt);
        *out = s.release();
    });
}

void fmm_series_free(fmm_series* s) { delete s; }

size_t fmm_series_size(const fmm_series* s) { return s ? s->ts.size() : 0; }

const double* fmm_series_time_points(const fmm_series* s) {
    return s ? s->ts.time_points.data() : nullptr;
}

const double* fmm_series_values(const fmm_series* s) {
    return s ? s->ts.values.data() : nullptr;
}

fmm_status fmm_series_to_csv(const fmm_series* s, char** out) {
    if (fmm_status st = require(s && out, "null argument"); st != FMM_OK) return st;
    return guarded([&] { *out = copy_string(fmm::series_to_csv(s->ts)); });
}

fmm_status fmm_series_write_csv(const fmm_series* s, const char* path) {
    if (fmm_status st = require(s && path, "null argument"); st != FMM_OK) return st;
    return guarded([&] {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw fmm::format_error(std::string("cannot open '") + path + "' for writing");
        f << fmm::series_to_csv(s->ts);
        if (!f.good()) throw fmm::format_error(std::string("failed writing '") + path + "'");
    });
}

void fmm_gen_spec_init(fmm_gen_spec* spec) {
    if (!spec) return;
    std::memset(spec, 0, sizeof(*spec));
    spec->from_t = 0.0;
    spec->to_t = fmm::kTwoPi;
    spec->length_out = 100;
}

fmm_status fmm_generate(const fmm_gen_spec* spec, fmm_series** out) {
    if (fmm_status st = require(spec && out, "null argument"); st != FMM_OK) return st;
    if (fmm_status st = require(spec->amp && spec->alpha && spec->beta && spec->omega,
                                "wave parameter arrays are required");
        st != FMM_OK)
        return st;
    return guarded([&] {
        fmm::GenSpec gs;
        gs.intercept = spec->intercept;
        gs.amp.assign(spec->amp, spec->amp + spec->amp_len);
        gs.alpha.assign(spec->alpha, spec->alpha + spec->alpha_len);
        gs.beta.assign(spec->beta, spec->beta + spec->beta_len);
        gs.omega.assign(spec->omega, spec->omega + spec->omega_len);
        gs.from = spec->from_t;
        gs.to = spec->to_t;
        gs.length_out = static_cast<int>(spec->length_out);
        if (spec->time_points) {
            gs.time_points.assign(spec->time_points, spec->time_points + spec->time_points_len);
        }
        gs.sigma_noise = spec->sigma_noise;
        if (spec->has_seed) gs.seed = spec->seed;
        fmm::Generated g = fmm::generate(gs);
        auto s = std::make_unique<fmm_series>();
        s->ts.time_points = std::move(g.t);
        s->ts.values = std::move(g.y);
        *out = s.release();
    });
}

fmm_status fmm_config_create(size_t nback, fmm_config** out) {
    if (fmm_status st = require(out != nullptr, "null argument"); st != FMM_OK) return st;
    if (fmm_status st = require(nback >= 1, "nback must be >= 1"); st != FMM_OK) return st;
    return guarded([&] {
        auto c = std::make_unique<fmm_config>();
        c->cfg.nback = static_cast<int>(nback);
        *out = c.release();
    });
}

void fmm_config_free(fmm_config* cfg) { delete cfg; }

fmm_status fmm_config_set_grid(fmm_config* cfg, size_t alpha_count, size_t omega_count,
                               size_t num_reps) {
    if (fmm_status st = require(cfg != nullptr, "null argument"); st != FMM_OK) return st;
    if (fmm_status st = require(alpha_count >= 2 && omega_count >= 2 && num_reps >= 1,
                                "grid lengths must be >= 2 and num_reps >= 1");
        st != FMM_OK)
        return st;
    cfg->cfg.length_alpha_grid = static_cast<int>(alpha_count);
    cfg->cfg.length_omega_grid = static_cast<int>(omega_count);
    cfg->cfg.num_reps = static_cast<int>(num_reps);
    return FMM_OK;
}

fmm_status fmm_config_set_max_iter(fmm_config* cfg, size_t maxiter) {
    if (fmm_status st = require(cfg && maxiter >= 1, "maxiter must be >= 1"); st != FMM_OK)
        return st;
    cfg->cfg.maxiter = static_cast<int>(maxiter);
    return FMM_OK;
}

fmm_status fmm_config_set_stop_r2(fmm_config* cfg, double dif_max) {
    if (fmm_status st = require(cfg != nullptr, "null argument"); st != FMM_OK) return st;
    if (fmm_status st = require(dif_max > 0.0, "dif_max must be > 0"); st != FMM_OK) return st;
    cfg->cfg.stop_rule = fmm::StopRule::R2Delta;
    cfg->cfg.dif_max = dif_max;
    return FMM_OK;
}

fmm_status fmm_config_set_stop_always_false(fmm_config* cfg) {
    if (fmm_status st = require(cfg != nullptr, "null argument"); st != FMM_OK) return st;
    cfg->cfg.stop_rule = fmm::StopRule::AlwaysFalse;
    cfg->cfg.dif_max = 0.0;
    return FMM_OK;
}

fmm_status fmm_config_set_beta_restrictions(fmm_config* cfg, const int* labels, size_t n) {
    if (fmm_status st = require(cfg && labels && n > 0, "null argument"); st != FMM_OK) return st;
    cfg->cfg.beta_blocks.assign(labels, labels + n);
    return FMM_OK;
}

fmm_status fmm_config_set_omega_restrictions(fmm_config* cfg, const int* labels, size_t n) {
    if (fmm_status st = require(cfg && labels && n > 0, "null argument"); st != FMM_OK) return st;
    cfg->cfg.omega_blocks.assign(labels, labels + n);
    return FMM_OK;
}

fmm_status fmm_config_set_parallel(fmm_config* cfg, int enabled) {
    if (fmm_status st = require(cfg != nullptr, "null argument"); st != FMM_OK) return st;
    cfg->cfg.parallelize = enabled != 0;
    return FMM_OK;
}

fmm_status fmm_fit_series(const fmm_series* s, const fmm_config* cfg, fmm_fit** out) {
    if (fmm_status st = require(s && cfg && out, "null argument"); st != FMM_OK) return st;
    return guarded([&] {
        auto f = std::make_unique<fmm_fit>();
        f->result = fmm::fit_restricted(s->ts, cfg->cfg);
        *out = f.release();
    });
}

void fmm_fit_free(fmm_fit* fit) { delete fit; }

size_t fmm_fit_wave_count(const fmm_fit* fit) {
    return fit ? fit->result.model.waves.size() : 0;
}

double fmm_fit_intercept(const fmm_fit* fit) {
    return fit ? fit->result.model.intercept : 0.0;
}

fmm_status fmm_fit_wave_params(const fmm_fit* fit, size_t index, double* amp, double* alpha,
                               double* beta, double* omega) {
    if (fmm_status st = require(fit && amp && alpha && beta && omega, "null argument");
        st != FMM_OK)
        return st;
    if (fmm_status st = require(index < fit->result.model.waves.size(), "wave index out of range");
        st != FMM_OK)
        return st;
    const fmm::Wave& w = fit->result.model.waves[index];
    *amp = w.amp;
    *alpha = w.alpha;
    *beta = w.beta;
    *omega = w.omega;
    return FMM_OK;
}

double fmm_fit_sse(const fmm_fit* fit) { return fit ? fit->result.sse : 0.0; }

double fmm_fit_r2_total(const fmm_fit* fit) { return fit ? fit->result.r2_total : 0.0; }

fmm_status fmm_fit_r2_waves(const fmm_fit* fit, double* out) {
    if (fmm_status st = require(fit && out, "null argument"); st != FMM_OK) return st;
    std::memcpy(out, fit->result.r2_per_wave.data(),
                fit->result.r2_per_wave.size() * sizeof(double));
    return FMM_OK;
}

size_t fmm_fit_iterations(const fmm_fit* fit) {
    return fit ? static_cast<size_t>(fit->result.n_iter) : 0;
}

int fmm_fit_stopped_by_rule(const fmm_fit* fit) {
    return fit && fit->result.stopped_by_rule ? 1 : 0;
}

size_t fmm_fit_sample_count(const fmm_fit* fit) {
    return fit ? fit->result.fitted_values.size() : 0;
}

fmm_status fmm_fit_fitted_values(const fmm_fit* fit, double* out) {
    if (fmm_status st = require(fit && out, "null argument"); st != FMM_OK) return st;
    std::memcpy(out, fit->result.fitted_values.data(),
                fit->result.fitted_values.size() * sizeof(double));
    return FMM_OK;
}

fmm_status fmm_fit_residuals(const fmm_fit* fit, double* out) {
    if (fmm_status st = require(fit && out, "null argument"); st != FMM_OK) return st;
    std::memcpy(out, fit->result.residuals.data(),
                fit->result.residuals.size() * sizeof(double));
    return FMM_OK;
}

fmm_status fmm_fit_peaks(const fmm_fit* fit, int wrap_to_2pi, double* t_upper, double* z_upper,
                         double* t_lower, double* z_lower) {
    if (fmm_status st = require(fit && t_upper && z_upper && t_lower && z_lower, "null argument");
        st != FMM_OK)
        return st;
    return guarded([&] {
        const auto peaks = fmm::model_peaks(fit->result.model, wrap_to_2pi != 0);
        for (size_t j = 0; j < peaks.size(); ++j) {
            t_upper[j] = peaks[j].t_upper;
            z_upper[j] = peaks[j].z_upper;
            t_lower[j] = peaks[j].t_lower;
            z_lower[j] = peaks[j].z_lower;
        }
    });
}

fmm_status fmm_fit_model_values(const fmm_fit* fit, const double* t, size_t n, double* out) {
    if (fmm_status st = require(fit && t && out, "null argument"); st != FMM_OK) return st;
    for (size_t i = 0; i < n; ++i) out[i] = fmm::model_value(t[i], fit->result.model);
    return FMM_OK;
}

fmm_status fmm_fit_wave_values(const fmm_fit* fit, size_t index, const double* t, size_t n,
                               double* out) {
    if (fmm_status st = require(fit && t && out, "null argument"); st != FMM_OK) return st;
    if (fmm_status st = require(index < fit->result.model.waves.size(), "wave index out of range");
        st != FMM_OK)
        return st;
    const fmm::Wave& w = fit->result.model.waves[index];
    for (size_t i = 0; i < n; ++i) out[i] = fmm::wave_value(t[i], w);
    return FMM_OK;
}

fmm_status fmm_fit_to_json(const fmm_fit* fit, char** out) {
    if (fmm_status st = require(fit && out, "null argument"); st != FMM_OK) return st;
    return guarded([&] { *out = copy_string(fmm::result_to_json(fit->result)); });
}

fmm_status fmm_fit_from_json(const char* json_text, fmm_fit** out) {
    if (fmm_status st = require(json_text && out, "null argument"); st != FMM_OK) return st;
    return guarded([&] {
        auto f = std::make_unique<fmm_fit>();
        f->result = fmm::result_from_json(json_text);
        *out = f.release();
    });
}

fmm_status fmm_fit_fitted_csv(const fmm_fit* fit, char** out) {
    if (fmm_status st = require(fit && out, "null argument"); st != FMM_OK) return st;
    return guarded([&] { *out = copy_string(fmm::fitted_csv(fit->result)); });
}

fmm_status fmm_fit_components_csv(const fmm_fit* fit, char** out) {
    if (fmm_status st = require(fit && out, "null argument"); st != FMM_OK) return st;
    return guarded([&] { *out = copy_string(fmm::components_csv(fit->result)); });
}

}  // extern "C"
