// SPDX-License-Identifier: Apache-2.0
//
// Security metrics for channel traces: Pearson correlation, the k-nearest-
// neighbor mutual-information estimator (max-norm joint balls, strict-
// inequality marginal counts, digamma corrections), lagged self-dependence
// profiles, and the closed-form Gaussian mutual information used as a
// validation oracle. All estimates are deterministic given their seeds and
// independent of the thread count.

#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "keyrate/trace.hpp"

namespace keyrate {

// Digamma function psi(x) for x > 0, via the ascending recurrence and the
// asymptotic series; absolute error <= 1e-10 for x >= 1 (in practice ~1e-15).
// Throws DomainError for x <= 0.
double digamma(double x);

// Sample Pearson correlation coefficient. Result is clamped to [-1, 1].
// Throws DomainError (length mismatch or < 2) and DegenerateInputError
// (either input constant).
double pearson(const std::vector<double>& x, const std::vector<double>& y);

// Mutual information of a bivariate Gaussian pair with correlation rho:
// -0.5 * log2(1 - rho^2), in bits. Throws DomainError for |rho| >= 1.
double gaussian_mi_closed_form(double rho);

// Sentinel for "derive the tie-breaking jitter amplitude from the data"
// (1e-6 times the larger of the two sample standard deviations).
inline constexpr double kAutoJitterAmplitude = -1.0;

// One mutual-information estimate with the metadata needed to reproduce it.
struct MIEstimate {
    double value = 0.0;  // bits per observation
    std::size_t neighbor_k = 0;
    std::size_t sample_count = 0;
    double jitter_amplitude = 0.0;  // amplitude actually applied
    std::uint64_t jitter_seed = 0;
};

// Adds independent uniform noise in [0, amplitude) to every coordinate of
// both sequences (per point: one draw for x, one for y), from a dedicated
// stream seeded by `seed`. No-op when amplitude is 0. Exposed so oracle
// implementations can replicate the exact pre-estimation transform.
void apply_tie_breaking_jitter(std::vector<double>& x, std::vector<double>& y, double amplitude,
                               std::uint64_t seed);

// For each point i of the (already jittered) sample, computes eps_i = the
// Chebyshev distance to its k-th nearest neighbor in the joint space, and the
// marginal neighbor counts n_x[i], n_y[i] = number of other points whose x
// (resp. y) coordinate lies strictly within eps_i of point i's. This is the
// exact neighbor-counting core of the estimator, exposed for equivalence
// testing against a brute-force oracle.
void ksg_neighbor_counts(const std::vector<double>& x, const std::vector<double>& y, std::size_t k,
                         std::vector<std::size_t>& n_x, std::vector<std::size_t>& n_y,
                         unsigned threads = 1);

// k-nearest-neighbor mutual-information estimate (variant with strict
// marginal counts and psi(n+1) corrections):
//   I = [psi(k) + psi(N) - mean_i(psi(n_x[i]+1) + psi(n_y[i]+1))] / ln 2.
// Samples are treated as i.i.d. — removing temporal dependence first is the
// caller's responsibility. jitter_amplitude < 0 selects the auto amplitude.
// Throws DomainError (length mismatch, k >= N) and DegenerateInputError
// (constant input after jitter).
MIEstimate ksg_mutual_information(const std::vector<double>& x, const std::vector<double>& y,
                                  std::size_t k, double jitter_amplitude = kAutoJitterAmplitude,
                                  std::uint64_t jitter_seed = 0, unsigned threads = 1);

// Self-dependence profile: for each lag l in [1, max_lag], the mutual
// information between the series and its l-step-shifted copy, estimated on
// the N-l overlapping pairs with a per-lag derived jitter seed.
// Requires 1 <= max_lag < length/2; throws DomainError otherwise.
std::vector<std::pair<std::size_t, MIEstimate>> lag_mi_profile(const TimeSeries& s,
                                                               std::size_t max_lag, std::size_t k,
                                                               double jitter_amplitude,
                                                               std::uint64_t seed,
                                                               unsigned threads = 1);

}  // namespace keyrate
