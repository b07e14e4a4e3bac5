// SPDX-License-Identifier: Apache-2.0

#include "keyrate/fading.hpp"

#include <cmath>

#include "keyrate/errors.hpp"

namespace keyrate {

double bessel_j0(double x) {
    if (!std::isfinite(x)) throw DomainError("bessel_j0: argument must be finite");
    // J0 is even; the library routine wants a non-negative argument.
    return std::cyl_bessel_j(0.0, std::fabs(x));
}

double jakes_correlation(double distance, double wavelength) {
    if (wavelength <= 0.0) throw DomainError("jakes_correlation: wavelength must be > 0");
    if (distance < 0.0) throw DomainError("jakes_correlation: distance must be >= 0");
    return bessel_j0(2.0 * 3.14159265358979323846 * distance / wavelength);
}

double near_field_boundary(double antenna_size, double wavelength) {
    if (wavelength <= 0.0) throw DomainError("near_field_boundary: wavelength must be > 0");
    if (antenna_size < 0.0) throw DomainError("near_field_boundary: antenna size must be >= 0");
    return 2.0 * antenna_size * antenna_size / wavelength;
}

const char* spatial_mode_name(SpatialMode mode) {
    switch (mode) {
        case SpatialMode::ideal_jakes: return "ideal_jakes";
        case SpatialMode::empirical_table: return "empirical_table";
        case SpatialMode::shifted_peak: return "shifted_peak";
    }
    return "unknown";
}

void SpatialProfile::validate() const {
    if (mode == SpatialMode::empirical_table) {
        if (table.empty())
            throw ConfigError("spatial profile: empirical_table mode requires a non-empty table");
        for (std::size_t i = 0; i < table.size(); ++i) {
            if (table[i].second < -1.0 || table[i].second > 1.0)
                throw ConfigError("spatial profile: table correlation at entry " + std::to_string(i) +
                                  " is outside [-1, 1]");
            if (i > 0 && table[i].first <= table[i - 1].first)
                throw ConfigError("spatial profile: table distances must be strictly increasing "
                                  "(violated at entry " +
                                  std::to_string(i) + ")");
        }
    }
    if (mode == SpatialMode::shifted_peak && peak_distance <= 0.0)
        throw ConfigError("spatial profile: shifted_peak mode requires peak_distance > 0");
}

double spatial_correlation(const SpatialProfile& profile, double distance, double wavelength) {
    profile.validate();
    switch (profile.mode) {
        case SpatialMode::ideal_jakes:
            return jakes_correlation(distance, wavelength);
        case SpatialMode::shifted_peak:
            return jakes_correlation(std::fabs(distance - profile.peak_distance), wavelength);
        case SpatialMode::empirical_table: {
            const auto& t = profile.table;
            if (distance <= t.front().first) return t.front().second;
            if (distance >= t.back().first) return t.back().second;
            for (std::size_t i = 1; i < t.size(); ++i) {
                if (distance <= t[i].first) {
                    const double x0 = t[i - 1].first, y0 = t[i - 1].second;
                    const double x1 = t[i].first, y1 = t[i].second;
                    const double w = (distance - x0) / (x1 - x0);
                    return y0 + w * (y1 - y0);
                }
            }
            return t.back().second;  // unreachable
        }
    }
    throw ConfigError("spatial profile: unknown mode");
}

}  // namespace keyrate
