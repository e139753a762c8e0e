#ifndef FMM_TIMESERIES_HPP
#define FMM_TIMESERIES_HPP

#include <string>
#include <vector>

#include "common.hpp"

namespace fmm {

// A single-period view of the data to fit: time points in [0, 2pi]
// (strictly increasing) and one value per time point. When the raw data
// covers several periods, values holds the per-time-point averages and
// raw_values keeps the original samples.
struct TimeSeries {
    std::vector<double> time_points;
    std::vector<double> values;
    int n_periods = 1;
    std::vector<double> raw_values;  // empty when n_periods == 1

    size_t size() const { return values.size(); }
};

// Maps clock time t' in [t0, t0 + T] onto [0, 2pi]: t = (t' - t0) * 2pi / T.
// Throws config_error when T <= 0.
std::vector<double> rescale_time(const std::vector<double>& t_prime, double t0, double period);

// Averages a multi-period record at each within-period position. raw length
// must be divisible by n_periods; time points are assigned equally spaced
// over [0, 2pi) when none are supplied.
TimeSeries summarize_periods(const std::vector<double>& raw, int n_periods,
                             const std::vector<double>& time_points = {});

struct CsvOptions {
    int n_periods = 1;
    double period = 0.0;  // > 0: rescale the time column from [t0, t0+period]
    double t0 = 0.0;
};

// Reads a header-bearing CSV with either a single "value" column or a
// "time,value" pair. Applies time rescaling when options.period > 0 and
// multi-period averaging when options.n_periods > 1. Throws format_error
// with the offending line number on malformed content.
TimeSeries read_csv(const std::string& path, const CsvOptions& options = {});

// Same parser over an in-memory buffer (the CSV reader's working form).
TimeSeries parse_csv(const std::string& text, const CsvOptions& options = {});

// Two-column "time,value" text with 17-significant-digit numbers covering
// the single-period view of the series.
std::string series_to_csv(const TimeSeries& ts);

}  // namespace fmm

#endif
