// SPDX-License-Identifier: Apache-2.0

#include "keyrate/channel_sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "keyrate/errors.hpp"
#include "keyrate/parallel.hpp"
#include "keyrate/rng.hpp"

namespace keyrate {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Cyclic-component shape parameters (see TemporalModel): the angular gain
// profile is a random Fourier series with this many harmonics, and randomized
// rotation resets its phase with probability 1/kResetMeanSamples per sample,
// walking at a rate drawn uniformly from [kRateLo, kRateHi] rad/sample.
constexpr std::size_t kProfileHarmonics = 32;
constexpr double kResetMeanSamples = 30.0;
constexpr double kRateLo = 0.024;
constexpr double kRateHi = 0.1;

// One cyclic Jacobi diagonalization of a symmetric 3x3 matrix.
void jacobi_eigen3(const std::array<std::array<double, 3>, 3>& input, std::array<double, 3>& values,
                   std::array<std::array<double, 3>, 3>& vectors) {
    double a[3][3];
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) a[r][c] = input[r][c];
    double v[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = std::fabs(a[0][1]) + std::fabs(a[0][2]) + std::fabs(a[1][2]);
        if (off < 1e-15) break;
        for (int p = 0; p < 2; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                if (a[p][q] == 0.0) continue;
                const double tau = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (tau >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int i = 0; i < 3; ++i) {
                    const double aip = a[i][p], aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for (int i = 0; i < 3; ++i) {
                    const double api = a[p][i], aqi = a[q][i];
                    a[p][i] = c * api - s * aqi;
                    a[q][i] = s * api + c * aqi;
                }
                for (int i = 0; i < 3; ++i) {
                    const double vip = v[i][p], viq = v[i][q];
                    v[i][p] = c * vip - s * viq;
                    v[i][q] = s * vip + c * viq;
                }
            }
        }
    }

    int order[3] = {0, 1, 2};
    std::sort(order, order + 3, [&](int i, int j) { return a[i][i] < a[j][j]; });
    for (int i = 0; i < 3; ++i) {
        values[i] = a[order[i]][order[i]];
        for (int r = 0; r < 3; ++r) vectors[r][i] = v[r][order[i]];
    }
}

}  // namespace

CorrelationMatrix3 CorrelationMatrix3::from_pairwise(double rho_xy, double rho_xz, double rho_yz) {
    const auto check = [](double rho, const char* name) {
        if (!(std::fabs(rho) <= 1.0))
            throw ConfigError(std::string("correlation matrix: |") + name + "| must be <= 1, got " +
                              std::to_string(rho));
    };
    check(rho_xy, "rho_xy");
    check(rho_xz, "rho_xz");
    check(rho_yz, "rho_yz");

    CorrelationMatrix3 matrix;
    matrix.m = {{{1.0, rho_xy, rho_xz}, {rho_xy, 1.0, rho_yz}, {rho_xz, rho_yz, 1.0}}};
    const double min_eig = matrix.min_eigenvalue();
    if (min_eig < -1e-10)
        throw ConfigError("correlation matrix: target (rho_xy=" + std::to_string(rho_xy) +
                          ", rho_xz=" + std::to_string(rho_xz) + ", rho_yz=" +
                          std::to_string(rho_yz) + ") is not positive semidefinite (eigenvalue " +
                          std::to_string(min_eig) + ")");
    return matrix;
}

std::array<double, 3> CorrelationMatrix3::eigenvalues() const {
    std::array<double, 3> values;
    std::array<std::array<double, 3>, 3> vectors;
    jacobi_eigen3(m, values, vectors);
    return values;
}

double CorrelationMatrix3::min_eigenvalue() const { return eigenvalues()[0]; }

std::array<std::array<double, 3>, 3> CorrelationMatrix3::symmetric_sqrt() const {
    std::array<double, 3> values;
    std::array<std::array<double, 3>, 3> vectors;
    jacobi_eigen3(m, values, vectors);

    std::array<double, 3> roots;
    for (int i = 0; i < 3; ++i) {
        double lambda = values[i];
        if (lambda < 0.0) {
            if (lambda >= -1e-10)
                lambda = 0.0;  // rounding at the PSD boundary
            else
                throw ConfigError("correlation matrix: cannot factorize, eigenvalue " +
                                  std::to_string(lambda) + " is negative");
        }
        roots[i] = std::sqrt(lambda);
    }

    std::array<std::array<double, 3>, 3> result{};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            double acc = 0.0;
            for (int i = 0; i < 3; ++i) acc += vectors[r][i] * roots[i] * vectors[c][i];
            result[r][c] = acc;
        }
    return result;
}

const char* cyclic_mode_name(CyclicMode mode) {
    switch (mode) {
        case CyclicMode::none: return "none";
        case CyclicMode::continuous: return "continuous";
        case CyclicMode::randomized: return "randomized";
    }
    return "unknown";
}

bool ar_is_stable(const std::vector<double>& coefficients) {
    // Step-down recursion on A(z) = 1 + sum alpha_i z^-i with alpha = -a:
    // stable iff every reflection coefficient has magnitude < 1.
    std::vector<double> alpha(coefficients.size());
    for (std::size_t i = 0; i < coefficients.size(); ++i) alpha[i] = -coefficients[i];
    for (std::size_t m = alpha.size(); m >= 1; --m) {
        const double kappa = alpha[m - 1];
        if (!(std::fabs(kappa) < 1.0)) return false;
        const double denom = 1.0 - kappa * kappa;
        std::vector<double> next(m - 1);
        for (std::size_t i = 1; i < m; ++i)
            next[i - 1] = (alpha[i - 1] - kappa * alpha[m - 1 - i]) / denom;
        alpha = std::move(next);
    }
    return true;
}

void TemporalModel::validate() const {
    for (double a : ar_coefficients)
        if (!std::isfinite(a)) throw ConfigError("temporal model: non-finite AR coefficient");
    if (!ar_is_stable(ar_coefficients))
        throw ConfigError("temporal model: AR coefficients describe an unstable process "
                          "(a characteristic root lies on or outside the unit circle)");
    if (cyclic_mode == CyclicMode::continuous && cyclic_period < 2)
        throw ConfigError("temporal model: continuous cyclic mode requires cyclic_period >= 2");
    if (cyclic_mode != CyclicMode::none && !(cyclic_amplitude >= 0.0))
        throw ConfigError("temporal model: cyclic_amplitude must be >= 0");
}

void ChannelConfig::validate() const {
    if (!(wavelength > 0.0)) throw ConfigError("channel config: wavelength must be > 0");
    if (!(ab_correlation >= 0.0 && ab_correlation < 1.0))
        throw ConfigError("channel config: ab_correlation must lie in [0, 1)");
    if (!(quantization_step >= 0.0))
        throw ConfigError("channel config: quantization_step must be >= 0");
    if (!(noise_floor_std >= 0.0))
        throw ConfigError("channel config: noise_floor_std must be >= 0");
    if (!(sampling_interval > 0.0))
        throw ConfigError("channel config: sampling_interval must be > 0");
    spatial_profile.validate();
    temporal.validate();
}

double consistency_factor(double ab_correlation) {
    return std::sqrt((1.0 + ab_correlation) / 2.0);
}

CorrelationMatrix3 build_correlation_matrix(const ChannelConfig& config, double eve_distance) {
    const double rho_spatial =
        spatial_correlation(config.spatial_profile, eve_distance, config.wavelength);
    const double rho_eve = rho_spatial * consistency_factor(config.ab_correlation);
    return CorrelationMatrix3::from_pairwise(config.ab_correlation, rho_eve, rho_eve);
}

namespace {

// Random angular gain profile: a fixed Fourier series over the rotation angle,
// normalized to unit RMS. Models the multipath pattern a rotating reflector
// sweeps through; a rough profile makes nearby angles decorrelate quickly.
class RotationProfile {
  public:
    explicit RotationProfile(GaussianSampler& gauss) {
        double power = 0.0;
        for (std::size_t m = 0; m < kProfileHarmonics; ++m) {
            cos_amp_[m] = gauss();
            sin_amp_[m] = gauss();
            power += cos_amp_[m] * cos_amp_[m] + sin_amp_[m] * sin_amp_[m];
        }
        norm_ = std::sqrt(power / 2.0);
        if (norm_ == 0.0) norm_ = 1.0;
    }

    double operator()(double theta) const {
        double acc = 0.0;
        for (std::size_t m = 0; m < kProfileHarmonics; ++m) {
            const double arg = static_cast<double>(m + 1) * theta;
            acc += cos_amp_[m] * std::cos(arg) + sin_amp_[m] * std::sin(arg);
        }
        return acc / norm_;
    }

  private:
    std::array<double, kProfileHarmonics> cos_amp_{};
    std::array<double, kProfileHarmonics> sin_amp_{};
    double norm_ = 1.0;
};

// Fills `component` with the cyclic gain sequence for n samples.
std::vector<double> cyclic_component(const TemporalModel& temporal, std::size_t n,
                                     std::uint64_t stream_seed) {
    GaussianSampler gauss(stream_seed);
    const RotationProfile profile(gauss);
    std::mt19937_64& rng = gauss.engine();

    std::vector<double> out(n);
    if (temporal.cyclic_mode == CyclicMode::continuous) {
        const double period = static_cast<double>(temporal.cyclic_period);
        const std::size_t offset =
            static_cast<std::size_t>(uniform_unit(rng) * period) % temporal.cyclic_period;
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t step = (k + offset) % temporal.cyclic_period;
            out[k] = profile(2.0 * kPi * static_cast<double>(step) / period);
        }
    } else {
        // Randomized rotation: a random-direction angular walk whose phase
        // resets at geometric times (mean kResetMeanSamples samples).
        double theta = 2.0 * kPi * uniform_unit(rng);
        double rate = kRateLo + (kRateHi - kRateLo) * uniform_unit(rng);
        double direction = uniform_unit(rng) < 0.5 ? 1.0 : -1.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (uniform_unit(rng) < 1.0 / kResetMeanSamples) {
                theta = 2.0 * kPi * uniform_unit(rng);
                rate = kRateLo + (kRateHi - kRateLo) * uniform_unit(rng);
                direction = uniform_unit(rng) < 0.5 ? 1.0 : -1.0;
            }
            theta += direction * rate;
            out[k] = profile(theta);
        }
    }
    for (double& v : out) v *= temporal.cyclic_amplitude;
    return out;
}

}  // namespace

TraceSet simulate_trace(const ChannelConfig& config, double eve_distance, std::size_t n_samples,
                        double ab_distance) {
    config.validate();
    if (n_samples == 0) throw DomainError("simulate_trace: n_samples must be >= 1");
    if (!(eve_distance >= 0.0)) throw DomainError("simulate_trace: eve_distance must be >= 0");
    if (!(ab_distance > 0.0)) throw DomainError("simulate_trace: ab_distance must be > 0");

    const CorrelationMatrix3 matrix = build_correlation_matrix(config, eve_distance);
    const auto sqrt_matrix = matrix.symmetric_sqrt();
    const double rho_eve = matrix.m[0][2];

    const std::vector<double>& ar = config.temporal.ar_coefficients;
    const std::size_t order = ar.size();
    const std::size_t warmup = order == 0 ? 0 : std::max<std::size_t>(100, 10 * order);
    const std::size_t total = n_samples + warmup;

    // Substream 1: the Gaussian innovations driving all three components.
    GaussianSampler gauss(mix_seed(config.seed, 1));
    std::array<std::vector<double>, 3> series;
    for (auto& s : series) s.resize(total);
    for (std::size_t k = 0; k < total; ++k) {
        const double w0 = gauss(), w1 = gauss(), w2 = gauss();
        for (int c = 0; c < 3; ++c) {
            double v = sqrt_matrix[c][0] * w0 + sqrt_matrix[c][1] * w1 + sqrt_matrix[c][2] * w2;
            for (std::size_t i = 1; i <= order && i <= k; ++i)
                v += ar[i - 1] * series[c][k - i];
            series[c][k] = v;
        }
    }
    for (auto& s : series) s.erase(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(warmup));

    // Substream 2: the rotation-like cyclic component, shared by the parties
    // and seen by Eve at her correlation.
    if (config.temporal.cyclic_mode != CyclicMode::none && config.temporal.cyclic_amplitude > 0.0) {
        const std::vector<double> cyc =
            cyclic_component(config.temporal, n_samples, mix_seed(config.seed, 2));
        for (std::size_t k = 0; k < n_samples; ++k) {
            series[0][k] += cyc[k];
            series[1][k] += cyc[k];
            series[2][k] += rho_eve * cyc[k];
        }
    }

    // Substream 3: independent per-sensor measurement noise.
    if (config.noise_floor_std > 0.0) {
        GaussianSampler noise(mix_seed(config.seed, 3));
        for (std::size_t k = 0; k < n_samples; ++k)
            for (int c = 0; c < 3; ++c) series[c][k] += config.noise_floor_std * noise();
    }

    if (config.quantization_step > 0.0) {
        const double step = config.quantization_step;
        for (auto& s : series)
            for (double& v : s) v = step * std::round(v / step);
    }

    TraceSet trace;
    trace.x.values = std::move(series[0]);
    trace.y.values = std::move(series[1]);
    trace.z.values = std::move(series[2]);
    trace.x.sampling_interval = config.sampling_interval;
    trace.y.sampling_interval = config.sampling_interval;
    trace.z.sampling_interval = config.sampling_interval;
    trace.eve_distance = eve_distance;
    trace.ab_distance = ab_distance;
    trace.wavelength = config.wavelength;
    trace.variant = Variant::original;
    std::ostringstream provenance;
    provenance << "simulated: seed=" << config.seed << " eve_distance_m=" << eve_distance
               << " samples=" << n_samples;
    trace.provenance = provenance.str();
    return trace;
}

SweepDataset simulate_sweep(const ChannelConfig& config, const std::vector<double>& distances,
                            std::size_t n_samples, double ab_distance, unsigned threads) {
    if (distances.empty()) throw DomainError("simulate_sweep: no distances given");
    for (std::size_t i = 1; i < distances.size(); ++i)
        if (!(distances[i] > distances[i - 1]))
            throw DomainError("simulate_sweep: distances must be strictly increasing (violated at "
                              "index " +
                              std::to_string(i) + ")");
    config.validate();

    SweepDataset sweep;
    sweep.positions.resize(distances.size());
    sweep.samples_per_step = n_samples;
    sweep.step_size = distances.size() >= 2 ? distances[1] - distances[0] : 0.0;

    parallel_for(distances.size(), threads, [&](std::size_t i) {
        ChannelConfig position_config = config;
        position_config.seed = mix_seed(config.seed, i);
        sweep.positions[i] = simulate_trace(position_config, distances[i], n_samples, ab_distance);
    });
    return sweep;
}

}  // namespace keyrate
