// SPDX-License-Identifier: Apache-2.0
//
// Spatial-correlation models for fading channels: the classical isotropic-
// scattering law (zero-order Bessel function of antenna separation), a
// piecewise-linear empirical profile, a shifted-peak variant for near-field-
// distorted measurements, and the near-field boundary formula.

#pragma once

#include <string>
#include <utility>
#include <vector>

namespace keyrate {

// Zero-order Bessel function of the first kind, J0(x).
// Absolute error <= 1e-9 for |x| <= 50 (in practice ~1e-15).
double bessel_j0(double x);

// Spatial cross-correlation of channel gains for two antennas `distance`
// apart under isotropic scattering: J0(2*pi*distance/wavelength).
// Throws DomainError for wavelength <= 0 or distance < 0.
double jakes_correlation(double distance, double wavelength);

// Distance below which antenna near-field effects distort far-field channel
// models: 2*D^2/lambda for largest antenna dimension D.
// Throws DomainError for wavelength <= 0 or antenna_size < 0.
double near_field_boundary(double antenna_size, double wavelength);

enum class SpatialMode {
    ideal_jakes,      // J0(2*pi*d/lambda)
    empirical_table,  // piecewise-linear interpolation of measured pairs
    shifted_peak,     // J0 profile whose maximum sits at peak_distance
};

const char* spatial_mode_name(SpatialMode mode);

// Description of how Eve's cross-correlation depends on her distance.
struct SpatialProfile {
    SpatialMode mode = SpatialMode::ideal_jakes;
    // (distance_m, correlation) pairs, distances strictly increasing,
    // correlations in [-1, 1]; required for empirical_table.
    std::vector<std::pair<double, double>> table;
    // Distance of the correlation maximum; required > 0 for shifted_peak.
    double peak_distance = 0.0;

    // Throws ConfigError if the profile violates its invariants.
    void validate() const;
};

// Evaluates the profile at one eavesdropper distance.
//   ideal_jakes:     jakes_correlation(distance, wavelength)
//   empirical_table: linear interpolation, clamped at the table ends
//   shifted_peak:    jakes_correlation(|distance - peak_distance|, wavelength)
// Throws ConfigError for an invalid profile (e.g. empty table).
double spatial_correlation(const SpatialProfile& profile, double distance, double wavelength);

}  // namespace keyrate
