#include "result_io.hpp"

#include <cmath>

#include <json.hpp>

namespace fmm {

namespace {

void append_number_array(std::string& out, const std::vector<double>& v) {
    out += '[';
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += fmt17(v[i]);
    }
    out += ']';
}

double require_number(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number()) {
        throw format_error(std::string("fit JSON: missing or non-numeric '") + key + "'");
    }
    return j[key].get<double>();
}

}  // namespace

std::string result_to_json(const FitResult& result) {
    std::string out;
    out += "{\n";
    out += "  \"M\": " + fmt17(result.model.intercept) + ",\n";
    out += "  \"waves\": [\n";
    for (size_t j = 0; j < result.model.waves.size(); ++j) {
        const Wave& w = result.model.waves[j];
        out += "    {\"A\": " + fmt17(w.amp) + ", \"alpha\": " + fmt17(w.alpha) +
               ", \"beta\": " + fmt17(w.beta) + ", \"omega\": " + fmt17(w.omega) + "}";
        out += (j + 1 < result.model.waves.size()) ? ",\n" : "\n";
    }
    out += "  ],\n";
    out += "  \"SSE\": " + fmt17(result.sse) + ",\n";
    out += "  \"R2\": ";
    append_number_array(out, result.r2_per_wave);
    out += ",\n";
    out += "  \"R2_total\": " + fmt17(result.r2_total) + ",\n";
    out += "  \"nIter\": " + std::to_string(result.n_iter) + ",\n";
    out += "  \"peaks\": [\n";
    for (size_t j = 0; j < result.peaks.size(); ++j) {
        const WavePeaks& p = result.peaks[j];
        out += "    {\"tU\": " + fmt17(p.t_upper) + ", \"tL\": " + fmt17(p.t_lower) +
               ", \"ZU\": " + fmt17(p.z_upper) + ", \"ZL\": " + fmt17(p.z_lower) + "}";
        out += (j + 1 < result.peaks.size()) ? ",\n" : "\n";
    }
    out += "  ],\n";
    out += "  \"fittedValues\": ";
    append_number_array(out, result.fitted_values);
    out += ",\n";
    out += "  \"residuals\": ";
    append_number_array(out, result.residuals);
    out += "\n}\n";
    return out;
}

FitResult result_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw format_error(std::string("fit JSON: ") + e.what());
    }
    if (!j.is_object()) throw format_error("fit JSON: top level must be an object");

    FitResult res;
    res.model.intercept = require_number(j, "M");
    if (!j.contains("waves") || !j["waves"].is_array() || j["waves"].empty()) {
        throw format_error("fit JSON: 'waves' must be a nonempty array");
    }
    for (const auto& wj : j["waves"]) {
        const double amp = require_number(wj, "A");
        const double alpha = require_number(wj, "alpha");
        const double beta = require_number(wj, "beta");
        const double omega = require_number(wj, "omega");
        if (!(amp >= 0.0) || !(omega >= 0.0 && omega <= 1.0)) {
            throw format_error("fit JSON: wave parameters out of range");
        }
        res.model.waves.push_back(Wave{amp, alpha, beta, omega});
    }
    res.sse = require_number(j, "SSE");
    if (!j.contains("R2") || !j["R2"].is_array() || j["R2"].size() != res.model.waves.size()) {
        throw format_error("fit JSON: 'R2' must list one value per wave");
    }
    for (const auto& v : j["R2"]) {
        if (!v.is_number()) throw format_error("fit JSON: non-numeric entry in 'R2'");
        res.r2_per_wave.push_back(v.get<double>());
    }
    res.r2_total = require_number(j, "R2_total");
    if (!j.contains("nIter") || !j["nIter"].is_number_integer()) {
        throw format_error("fit JSON: missing or non-integer 'nIter'");
    }
    res.n_iter = j["nIter"].get<int>();
    if (!j.contains("peaks") || !j["peaks"].is_array() ||
        j["peaks"].size() != res.model.waves.size()) {
        throw format_error("fit JSON: 'peaks' must list one entry per wave");
    }
    for (const auto& pj : j["peaks"]) {
        res.peaks.push_back(WavePeaks{require_number(pj, "tU"), require_number(pj, "ZU"),
                                      require_number(pj, "tL"), require_number(pj, "ZL")});
    }
    auto read_array = [&](const char* key, std::vector<double>& out) {
        if (!j.contains(key) || !j[key].is_array()) {
            throw format_error(std::string("fit JSON: missing array '") + key + "'");
        }
        for (const auto& v : j[key]) {
            if (!v.is_number()) {
                throw format_error(std::string("fit JSON: non-numeric entry in '") + key + "'");
            }
            out.push_back(v.get<double>());
        }
    };
    read_array("fittedValues", res.fitted_values);
    read_array("residuals", res.residuals);
    if (res.fitted_values.size() != res.residuals.size() || res.fitted_values.empty()) {
        throw format_error("fit JSON: fittedValues and residuals must have equal nonzero length");
    }
    return res;
}

std::string fitted_csv(const FitResult& result) {
    if (result.time_points.size() != result.fitted_values.size()) {
        throw config_error("result does not carry time points");
    }
    std::string out = "timePoints,fitted\n";
    for (size_t i = 0; i < result.fitted_values.size(); ++i) {
        out += fmt17(result.time_points[i]);
        out += ',';
        out += fmt17(result.fitted_values[i]);
        out += '\n';
    }
    return out;
}

std::string components_csv(const FitResult& result) {
    if (result.time_points.size() != result.fitted_values.size()) {
        throw config_error("result does not carry time points");
    }
    std::string out = "timePoints";
    for (size_t j = 0; j < result.model.waves.size(); ++j) {
        out += ",wave" + std::to_string(j + 1);
    }
    out += '\n';
    for (size_t i = 0; i < result.time_points.size(); ++i) {
        out += fmt17(result.time_points[i]);
        for (const Wave& w : result.model.waves) {
            out += ',';
            out += fmt17(wave_value(result.time_points[i], w));
        }
        out += '\n';
    }
    return out;
}

}  // namespace fmm
