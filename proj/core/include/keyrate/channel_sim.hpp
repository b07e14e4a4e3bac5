// SPDX-License-Identifier: Apache-2.0
//
// Reproducible generator of jointly stationary three-party channel-gain
// processes: i.i.d. standard Gaussian triples are correlated through a
// factorized 3x3 correlation matrix, shaped temporally by per-component AR
// filtering (with warm-up discard) and an optional rotation-like cyclic
// component, then degraded by independent sensor noise and optional RSSI
// quantization. Identical configuration and seed yield bit-identical traces
// across runs and thread counts.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "keyrate/fading.hpp"
#include "keyrate/trace.hpp"

namespace keyrate {

// Symmetric 3x3 correlation matrix with positive-semidefiniteness checking
// and a symmetric square-root factorization.
struct CorrelationMatrix3 {
    std::array<std::array<double, 3>, 3> m{};

    // Builds [[1, rho_xy, rho_xz], [rho_xy, 1, rho_yz], [rho_xz, rho_yz, 1]].
    // Throws ConfigError if any |rho| > 1 or the matrix is not positive
    // semidefinite (the message names the offending eigenvalue).
    static CorrelationMatrix3 from_pairwise(double rho_xy, double rho_xz, double rho_yz);

    // Eigenvalues in ascending order (cyclic Jacobi; exact to ~1e-15 here).
    std::array<double, 3> eigenvalues() const;
    double min_eigenvalue() const;

    // Symmetric square root S with S*S = m. Eigenvalues in [-1e-10, 0) are
    // clamped to 0 to tolerate rounding at the PSD boundary; anything lower
    // throws ConfigError naming the eigenvalue.
    std::array<std::array<double, 3>, 3> symmetric_sqrt() const;
};

enum class CyclicMode { none, continuous, randomized };

const char* cyclic_mode_name(CyclicMode mode);

// Temporal structure of the simulated gains.
struct TemporalModel {
    // a_1..a_p of x_k = sum a_i x_{k-i} + innovation; empty = white.
    std::vector<double> ar_coefficients;
    CyclicMode cyclic_mode = CyclicMode::none;
    std::size_t cyclic_period = 96;   // samples per revolution (continuous mode)
    double cyclic_amplitude = 1.5;    // dB, RMS of the added component

    // Throws ConfigError for an unstable AR polynomial, a continuous period
    // < 2, or a negative amplitude.
    void validate() const;
};

// Stability check for prediction-form AR coefficients (all characteristic
// roots strictly inside the unit circle), via the reflection-coefficient
// step-down recursion. An empty list is stable.
bool ar_is_stable(const std::vector<double>& coefficients);

// Full description of the simulated channel for one campaign.
struct ChannelConfig {
    double wavelength = 0.125;        // meters
    double ab_correlation = 0.99;     // target correlation between the parties
    SpatialProfile spatial_profile;   // Eve's correlation vs distance
    TemporalModel temporal;
    double quantization_step = 0.0;   // dB; 0 = no quantization
    double noise_floor_std = 0.0;     // dB
    double sampling_interval = 0.1;   // seconds
    std::uint64_t seed = 1;

    // Throws ConfigError on any violated invariant, naming the field.
    void validate() const;
};

// Scale factor applied to Eve's spatial correlation so that the joint matrix
// stays positive semidefinite for every profile value: sqrt((1 + rho_xy)/2).
double consistency_factor(double ab_correlation);

// Correlation matrix for one eavesdropper position: rho_xy from the config,
// rho_xz = rho_yz = spatial_correlation(profile, distance, wavelength) scaled
// by the consistency factor. Throws ConfigError if the target is not PSD.
CorrelationMatrix3 build_correlation_matrix(const ChannelConfig& config, double eve_distance);

// Generates one position's aligned (x, y, z) trace. Deterministic given
// (config.seed, eve_distance, n_samples). variant = original.
TraceSet simulate_trace(const ChannelConfig& config, double eve_distance, std::size_t n_samples,
                        double ab_distance);

// Generates a whole campaign; position i uses the derived seed
// mix_seed(config.seed, i), so any position can be regenerated alone.
// Positions may be generated concurrently (threads = 0 means hardware).
// Throws DomainError unless distances are strictly increasing and non-empty.
SweepDataset simulate_sweep(const ChannelConfig& config, const std::vector<double>& distances,
                            std::size_t n_samples, double ab_distance, unsigned threads = 0);

}  // namespace keyrate
