// SPDX-License-Identifier: Apache-2.0
//
// Temporal-dependence-removal pipelines for channel traces. Two strategies:
// index decimation (keep every Nth sample) and linear-prediction
// decorrelation (fit a forward predictor by the Levinson-Durbin recursion on
// the Toeplitz normal equations, then keep the prediction residual, i.e. the
// innovation sequence).

#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "keyrate/trace.hpp"

namespace keyrate {

// Keeps samples at indices 0, factor, 2*factor, ...; the sampling interval is
// multiplied by the factor. factor = 1 is the identity.
// Throws DomainError for factor = 0.
TimeSeries downsample(const TimeSeries& s, std::size_t factor);

// Raw (uncentered) autocorrelation estimate:
//   r[l] = (1/(N-l)) * sum_{i=0}^{N-l-1} s_i * s_{i+l},  l = 0..max_lag.
// No mean subtraction — this is the plain second-moment estimator. Summation
// runs in ascending index order so results are reproducible bit-for-bit.
// Throws DomainError if max_lag >= length.
std::vector<double> autocorrelation(const TimeSeries& s, std::size_t max_lag);

// Subtracts the sample mean.
TimeSeries mean_center(const TimeSeries& s);

// Forward linear predictor fitted to an autocorrelation sequence.
struct PredictorModel {
    std::size_t order = 0;
    std::vector<double> coefficients;          // a_1..a_order: x̂_k = Σ a_i x_{k-i}
    double residual_variance = 0.0;            // innovation variance estimate
    std::vector<double> source_autocorrelation;  // r[0..order] the fit used
};

// Called when the recursion clamps a reflection coefficient at the stability
// boundary instead of aborting.
using WarningHandler = std::function<void(const std::string&)>;

// Solves the order-p Toeplitz normal equations for r[0..p] by the
// Levinson-Durbin recursion. residual_variance = r[0] * Π (1 - κ_m²) over the
// reflection coefficients κ_m. Reflection coefficients with |κ| in
// [1, 1+1e-12] are clamped to sign(κ)·(1-1e-12) with a warning; residual
// variances in [-1e-12, 0) are clamped to 0.
// Throws DomainError (r[0] <= 0 or fewer than two entries) and
// IllConditionedError (|κ| > 1+1e-12, a non-PSD sequence).
PredictorModel levinson_durbin(const std::vector<double>& r, const WarningHandler& warn = {});

// Applies the predictor: output[k - order] = Σ a_i s[k-i] for k = order..N-1,
// so the result has length N - order.
// Throws DomainError if the series is no longer than the order.
TimeSeries predict(const TimeSeries& s, const PredictorModel& model);

// Full decorrelation pipeline: mean-center, estimate autocorrelation to
// `order` lags, fit the predictor, subtract the one-step prediction. The
// output (the innovation sequence) has length N - order.
// Requires N > 2*order and order >= 1; throws DomainError otherwise.
std::pair<TimeSeries, PredictorModel> decorrelate(const TimeSeries& s, std::size_t order,
                                                  const WarningHandler& warn = {});

enum class ProcessingMethod { downsample, decorrelate };

// Applies one pipeline identically and independently to every component of a
// trace (x, y, z, and z_secondary if present) and tags the variant. For
// decorrelation the fitted per-component models are appended to the trace's
// provenance text for reproducibility audits.
// Throws DomainError if the trace is not of the original variant.
TraceSet process_traceset(const TraceSet& trace, ProcessingMethod method,
                          std::size_t order_or_factor, const WarningHandler& warn = {});

// Text persistence for predictor models (17-significant-digit decimals, so
// round-trips are exact).
std::string predictor_to_text(const PredictorModel& model);
PredictorModel predictor_from_text(const std::string& text);

}  // namespace keyrate
