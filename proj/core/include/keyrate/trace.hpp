// SPDX-License-Identifier: Apache-2.0
//
// Core data types for channel-gain traces: a single sampled gain series, the
// aligned three-party observation set for one eavesdropper position, a whole
// distance-sweep campaign, and structural validation over all of them.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace keyrate {

// One real-valued channel-gain sequence (dB) with a fixed sampling interval.
struct TimeSeries {
    std::vector<double> values;
    double sampling_interval = 1.0;  // seconds between samples

    std::size_t size() const { return values.size(); }
    bool empty() const { return values.empty(); }
    double operator[](std::size_t i) const { return values[i]; }
};

// Processing stage of a trace: as captured, index-decimated, or replaced by
// its linear-prediction innovation.
enum class Variant { original = 0, downsampled = 1, decorrelated = 2 };

inline constexpr std::size_t kVariantCount = 3;

const char* variant_name(Variant v);
std::optional<Variant> variant_from_name(const std::string& name);

// Aligned observations (x_k, y_k, z_k[, z2_k]) for one eavesdropper position:
// x and y are the two legitimate parties' reciprocal measurements, z is the
// eavesdropper's observation of the first party's transmissions, z_secondary
// (if measured) her observation of the second party's.
struct TraceSet {
    TimeSeries x;
    TimeSeries y;
    TimeSeries z;
    std::optional<TimeSeries> z_secondary;
    double eve_distance = 0.0;  // meters between Eve and the nearer party
    double ab_distance = 5.0;   // meters between the legitimate parties
    double wavelength = 0.125;  // meters
    Variant variant = Variant::original;
    std::string provenance;  // simulator seed or source file

    std::size_t length() const { return x.size(); }
};

// Swaps the secondary eavesdropper channel into the analyzed z slot.
// Throws DomainError if no secondary channel is present.
void use_secondary_eve(TraceSet& trace);

// One measurement campaign: TraceSets ordered by strictly increasing
// eavesdropper distance, sharing variant, wavelength, and geometry.
struct SweepDataset {
    std::vector<TraceSet> positions;  // sorted ascending by eve_distance
    double step_size = 0.0;           // meters between consecutive positions
    std::size_t samples_per_step = 0;

    std::size_t size() const { return positions.size(); }
};

// Outcome of one structural check.
struct ValidationCheck {
    std::string name;
    bool passed = true;
    std::string message;  // names the offending index/position on failure
};

// Per-check pass/fail record for a trace or campaign.
struct ValidationReport {
    std::vector<ValidationCheck> checks;

    bool all_passed() const;
    std::string to_string() const;
};

// Checks TraceSet invariants: component length/interval alignment, value
// finiteness (failures cite the index), non-negative geometry, minimum
// analyzable length of 2. Never throws; problems become report entries.
ValidationReport validate_trace(const TraceSet& trace);

// Checks SweepDataset invariants: strictly increasing distances, uniform
// variant/wavelength/geometry/length across positions, plus every position's
// trace checks. Failures name the position.
ValidationReport validate_sweep(const SweepDataset& sweep);

}  // namespace keyrate
