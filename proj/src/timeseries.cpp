#include "timeseries.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace fmm {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& cell, size_t line_no) {
    const std::string t = trim(cell);
    if (t.empty()) {
        throw format_error("line " + std::to_string(line_no) + ": empty cell");
    }
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || !std::isfinite(v)) {
        throw format_error("line " + std::to_string(line_no) + ": non-numeric value '" + t + "'");
    }
    return v;
}

void check_monotone(const std::vector<double>& t) {
    for (size_t i = 1; i < t.size(); ++i) {
        if (!(t[i] > t[i - 1])) {
            throw format_error("time column must be strictly increasing (row " +
                               std::to_string(i + 1) + " of the data)");
        }
    }
}

}  // namespace

std::vector<double> rescale_time(const std::vector<double>& t_prime, double t0, double period) {
    if (!(period > 0.0)) {
        throw config_error("period must be positive to rescale time");
    }
    std::vector<double> out(t_prime.size());
    for (size_t i = 0; i < t_prime.size(); ++i) {
        out[i] = (t_prime[i] - t0) * kTwoPi / period;
    }
    return out;
}

TimeSeries summarize_periods(const std::vector<double>& raw, int n_periods,
                             const std::vector<double>& time_points) {
    if (n_periods < 1) {
        throw config_error("number of periods must be >= 1");
    }
    if (raw.size() % static_cast<size_t>(n_periods) != 0) {
        throw format_error("sample count " + std::to_string(raw.size()) +
                           " is not divisible by " + std::to_string(n_periods) + " periods");
    }
    const size_t n = raw.size() / static_cast<size_t>(n_periods);
    TimeSeries ts;
    ts.n_periods = n_periods;
    ts.values.assign(n, 0.0);
    for (size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int k = 0; k < n_periods; ++k) sum += raw[i + static_cast<size_t>(k) * n];
        ts.values[i] = sum / n_periods;
    }
    if (!time_points.empty()) {
        if (time_points.size() != n) {
            throw format_error("per-period time point count does not match the data");
        }
        ts.time_points = time_points;
    } else {
        ts.time_points.resize(n);
        for (size_t i = 0; i < n; ++i) ts.time_points[i] = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
    }
    if (n_periods > 1) ts.raw_values = raw;
    return ts;
}

TimeSeries parse_csv(const std::string& text, const CsvOptions& options) {
    if (options.n_periods < 1) {
        throw config_error("number of periods must be >= 1");
    }
    std::istringstream in(text);
    std::string line;
    size_t line_no = 0;
    bool has_time = false;

    if (!std::getline(in, line)) {
        throw format_error("empty CSV input");
    }
    ++line_no;
    {
        const std::string header = trim(line);
        if (header == "time,value") {
            has_time = true;
        } else if (header == "value") {
            has_time = false;
        } else {
            throw format_error("line 1: expected header 'value' or 'time,value', got '" + header + "'");
        }
    }

    std::vector<double> times;
    std::vector<double> values;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string row = trim(line);
        if (row.empty()) continue;
        const size_t comma = row.find(',');
        if (has_time) {
            if (comma == std::string::npos || row.find(',', comma + 1) != std::string::npos) {
                throw format_error("line " + std::to_string(line_no) + ": expected two columns");
            }
            times.push_back(parse_number(row.substr(0, comma), line_no));
            values.push_back(parse_number(row.substr(comma + 1), line_no));
        } else {
            if (comma != std::string::npos) {
                throw format_error("line " + std::to_string(line_no) + ": expected one column");
            }
            values.push_back(parse_number(row, line_no));
        }
    }
    if (values.size() < 5) {
        throw format_error("need at least 5 data rows, got " + std::to_string(values.size()));
    }

    if (!has_time) {
        return summarize_periods(values, options.n_periods);
    }

    if (options.period > 0.0) {
        times = rescale_time(times, options.t0, options.period);
    } else if (options.period < 0.0) {
        throw config_error("period must be positive");
    }
    check_monotone(times);

    const int p = options.n_periods;
    if (p == 1) {
        if (times.front() < -1e-9 || times.back() > kTwoPi + 1e-9) {
            throw format_error("time points must lie within one period ([0, 2pi] after rescaling)");
        }
        TimeSeries ts;
        ts.time_points = std::move(times);
        ts.values = std::move(values);
        return ts;
    }

    if (values.size() % static_cast<size_t>(p) != 0) {
        throw format_error("sample count " + std::to_string(values.size()) +
                           " is not divisible by " + std::to_string(p) + " periods");
    }
    const size_t n = values.size() / static_cast<size_t>(p);
    // Averaging assumes every period samples the same within-period phases.
    for (size_t j = 0; j < values.size(); ++j) {
        const double expected = times[j % n] + kTwoPi * static_cast<double>(j / n);
        if (std::abs(times[j] - expected) > 1e-9 * (1.0 + std::abs(expected))) {
            throw format_error("periods are ragged: time points do not repeat at the same "
                               "within-period phases (row " + std::to_string(j + 1) + " of the data)");
        }
    }
    std::vector<double> first_period(times.begin(), times.begin() + static_cast<long>(n));
    if (first_period.front() < -1e-9 || first_period.back() > kTwoPi + 1e-9) {
        throw format_error("within-period time points must lie in [0, 2pi] after rescaling");
    }
    return summarize_periods(values, p, first_period);
}

TimeSeries read_csv(const std::string& path, const CsvOptions& options) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw format_error("cannot open '" + path + "'");
    }
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_csv(buf.str(), options);
}

std::string series_to_csv(const TimeSeries& ts) {
    std::string out = "time,value\n";
    for (size_t i = 0; i < ts.size(); ++i) {
        out += fmt17(ts.time_points[i]);
        out += ',';
        out += fmt17(ts.values[i]);
        out += '\n';
    }
    return out;
}

}  // namespace fmm
