#ifndef FMM_RESULT_IO_HPP
#define FMM_RESULT_IO_HPP

#include <string>

#include "fit.hpp"

namespace fmm {

// Fixed-layout JSON with keys M, waves[{A, alpha, beta, omega}], SSE,
// R2, R2_total, nIter, peaks[{tU, tL, ZU, ZL}], fittedValues, residuals.
// Numbers carry 17 significant digits, so serialize -> parse -> serialize
// is byte-identical.
std::string result_to_json(const FitResult& result);

// Inverse of result_to_json. The returned result has no time points (the
// schema does not carry them). Throws format_error on malformed or
// inconsistent documents.
FitResult result_from_json(const std::string& text);

// "timePoints,fitted" rows. Requires a result that still carries its time
// points (i.e. produced by a fit, not parsed from JSON).
std::string fitted_csv(const FitResult& result);

// "timePoints,wave1,...,waveM" with the centered per-wave contributions
// A_J cos(phi_J(t)); no intercept, so the columns plus M sum to the fit.
std::string components_csv(const FitResult& result);

}  // namespace fmm

#endif
