// SPDX-License-Identifier: Apache-2.0

#include "keyrate/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "keyrate/errors.hpp"
#include "keyrate/kdtree.hpp"
#include "keyrate/parallel.hpp"
#include "keyrate/rng.hpp"

namespace keyrate {

double digamma(double x) {
    if (!(x > 0.0)) throw DomainError("digamma: argument must be > 0");
    double result = 0.0;
    // Lift small arguments with psi(x) = psi(x+1) - 1/x until the asymptotic
    // series converges fast.
    while (x < 10.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // psi(x) ~ ln x - 1/(2x) - sum of Bernoulli terms B_2n/(2n x^2n).
    const double tail =
        inv2 * (1.0 / 12.0 -
                inv2 * (1.0 / 120.0 -
                        inv2 * (1.0 / 252.0 -
                                inv2 * (1.0 / 240.0 -
                                        inv2 * (1.0 / 132.0 -
                                                inv2 * (691.0 / 32760.0 - inv2 * (1.0 / 12.0)))))));
    return result + std::log(x) - 0.5 * inv - tail;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw DomainError("pearson: sequence lengths differ");
    const std::size_t n = x.size();
    if (n < 2) throw DomainError("pearson: need at least 2 samples");

    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_x += x[i];
        mean_y += y[i];
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);

    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mean_x;
        const double dy = y[i] - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw DegenerateInputError("pearson: constant input sequence (zero variance)");
    const double r = sxy / (std::sqrt(sxx) * std::sqrt(syy));
    return std::clamp(r, -1.0, 1.0);
}

double gaussian_mi_closed_form(double rho) {
    if (!(std::fabs(rho) < 1.0))
        throw DomainError("gaussian_mi_closed_form: |rho| must be < 1 (mutual information diverges)");
    return -0.5 * std::log1p(-rho * rho) / std::log(2.0);
}

void apply_tie_breaking_jitter(std::vector<double>& x, std::vector<double>& y, double amplitude,
                               std::uint64_t seed) {
    if (amplitude == 0.0) return;
    if (amplitude < 0.0) throw DomainError("apply_tie_breaking_jitter: amplitude must be >= 0");
    if (x.size() != y.size())
        throw DomainError("apply_tie_breaking_jitter: sequence lengths differ");
    std::mt19937_64 rng(mix_seed(seed));
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] += amplitude * uniform_unit(rng);
        y[i] += amplitude * uniform_unit(rng);
    }
}

namespace {

double sample_standard_deviation(const std::vector<double>& v) {
    const std::size_t n = v.size();
    if (n < 2) return 0.0;
    double mean = 0.0;
    for (double value : v) mean += value;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double value : v) {
        const double d = value - mean;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(n - 1));
}

// Count of elements of `sorted` whose value lies strictly within eps of q,
// computed with predicates on differences so the result matches a direct
// fabs(v - q) < eps scan bit for bit.
std::size_t strict_window_count(const std::vector<double>& sorted, double q, double eps) {
    const auto below = std::partition_point(sorted.begin(), sorted.end(),
                                            [&](double v) { return q - v >= eps; });
    const auto above = std::partition_point(below, sorted.end(),
                                            [&](double v) { return v - q < eps; });
    return static_cast<std::size_t>(above - below);
}

}  // namespace

void ksg_neighbor_counts(const std::vector<double>& x, const std::vector<double>& y, std::size_t k,
                         std::vector<std::size_t>& n_x, std::vector<std::size_t>& n_y,
                         unsigned threads) {
    if (x.size() != y.size()) throw DomainError("ksg_neighbor_counts: sequence lengths differ");
    const std::size_t n = x.size();
    if (k == 0 || k >= n)
        throw DomainError("ksg_neighbor_counts: need 1 <= k < N (k = " + std::to_string(k) +
                          ", N = " + std::to_string(n) + ")");

    std::vector<double> sorted_x(x), sorted_y(y);
    std::sort(sorted_x.begin(), sorted_x.end());
    std::sort(sorted_y.begin(), sorted_y.end());

    const KdTree2D tree(x, y);
    n_x.assign(n, 0);
    n_y.assign(n, 0);
    parallel_for(n, threads, [&](std::size_t i) {
        const double eps = tree.kth_neighbor_distance(i, k);
        // The point itself sits inside any positive window; subtract it so the
        // counts cover *other* points only.
        const std::size_t self = eps > 0.0 ? 1 : 0;
        n_x[i] = strict_window_count(sorted_x, x[i], eps) - self;
        n_y[i] = strict_window_count(sorted_y, y[i], eps) - self;
    });
}

MIEstimate ksg_mutual_information(const std::vector<double>& x, const std::vector<double>& y,
                                  std::size_t k, double jitter_amplitude, std::uint64_t jitter_seed,
                                  unsigned threads) {
    if (x.size() != y.size())
        throw DomainError("ksg_mutual_information: sequence lengths differ");
    const std::size_t n = x.size();
    if (k == 0 || k >= n)
        throw DomainError("ksg_mutual_information: need 1 <= k < N (k = " + std::to_string(k) +
                          ", N = " + std::to_string(n) + ")");

    double amplitude = jitter_amplitude;
    if (amplitude < 0.0)
        amplitude = 1e-6 * std::max(sample_standard_deviation(x), sample_standard_deviation(y));

    std::vector<double> jx(x), jy(y);
    apply_tie_breaking_jitter(jx, jy, amplitude, jitter_seed);

    const auto [x_min, x_max] = std::minmax_element(jx.begin(), jx.end());
    const auto [y_min, y_max] = std::minmax_element(jy.begin(), jy.end());
    if (*x_min == *x_max || *y_min == *y_max)
        throw DegenerateInputError("ksg_mutual_information: zero-variance input after jitter");

    std::vector<std::size_t> n_x, n_y;
    ksg_neighbor_counts(jx, jy, k, n_x, n_y, threads);

    std::vector<double> terms(n);
    parallel_for(n, threads, [&](std::size_t i) {
        terms[i] = digamma(static_cast<double>(n_x[i] + 1)) + digamma(static_cast<double>(n_y[i] + 1));
    });
    // Fixed-order reduction keeps the result identical for every thread count.
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += terms[i];

    MIEstimate estimate;
    estimate.neighbor_k = k;
    estimate.sample_count = n;
    estimate.jitter_amplitude = amplitude;
    estimate.jitter_seed = jitter_seed;
    estimate.value = (digamma(static_cast<double>(k)) + digamma(static_cast<double>(n)) -
                      sum / static_cast<double>(n)) /
                     std::log(2.0);
    return estimate;
}

std::vector<std::pair<std::size_t, MIEstimate>> lag_mi_profile(const TimeSeries& s,
                                                               std::size_t max_lag, std::size_t k,
                                                               double jitter_amplitude,
                                                               std::uint64_t seed,
                                                               unsigned threads) {
    if (max_lag == 0) throw DomainError("lag_mi_profile: max_lag must be >= 1");
    if (max_lag >= s.size() / 2)
        throw DomainError("lag_mi_profile: max_lag " + std::to_string(max_lag) +
                          " must be below half the series length (" + std::to_string(s.size()) +
                          " samples)");

    std::vector<std::pair<std::size_t, MIEstimate>> profile;
    profile.reserve(max_lag);
    for (std::size_t lag = 1; lag <= max_lag; ++lag) {
        const std::size_t m = s.size() - lag;
        std::vector<double> head(s.values.begin(), s.values.begin() + static_cast<std::ptrdiff_t>(m));
        std::vector<double> tail(s.values.begin() + static_cast<std::ptrdiff_t>(lag), s.values.end());
        profile.emplace_back(lag, ksg_mutual_information(head, tail, k, jitter_amplitude,
                                                         mix_seed(seed, lag), threads));
    }
    return profile;
}

}  // namespace keyrate
