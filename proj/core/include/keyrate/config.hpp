// SPDX-License-Identifier: Apache-2.0
//
// Structured key-value run configuration: one file with flat sections
// ([channel], [pipeline], [estimator], [sweep], [io]) whose keys mirror the
// measurement-setup parameters (sampling_interval_s, step_size_m,
// distance_be_range_m, distance_ab_m, samples_per_step, ...). Unknown keys
// and malformed values are errors that name the offending field.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "keyrate/analysis.hpp"
#include "keyrate/channel_sim.hpp"

namespace keyrate {

// Eavesdropper-distance grid and per-position sample budget of a campaign.
struct SweepPlanConfig {
    double distance_min = 0.0;            // meters
    double distance_max = 0.30;           // meters
    double step = 0.005;                  // meters
    std::size_t samples_per_step = 300000;
    double ab_distance = 5.0;             // meters
};

struct IoConfig {
    // Analyze the secondary eavesdropper channel (z2) instead of z when the
    // trace carries one.
    bool use_secondary_eve = false;
};

// Everything a command run needs. Defaults reproduce the reference
// measurement geometry: 2.4 GHz (12.5 cm wavelength), 100 ms sampling,
// 61 positions at 5 mm steps over [0, 30] cm, 3*10^5 samples per step,
// 5 m between the legitimate parties, downsampling factor and decorrelation
// order 30, 4 nearest neighbors.
struct RunConfig {
    ChannelConfig channel;
    PipelineConfig pipeline;
    EstimatorConfig estimator;
    SweepPlanConfig sweep;
    IoConfig io;

    // Throws ConfigError naming the field on any violated invariant.
    void validate() const;
};

// Parses configuration text. `origin` labels error messages (usually the
// file path). Starts from defaults; every assignment overrides one field.
RunConfig parse_run_config(const std::string& text, const std::string& origin = "<config>");

// Loads and parses a configuration file. Throws IoError if unreadable.
RunConfig load_run_config(const std::filesystem::path& path);

// The distance grid described by the plan: distance_min, +step, ... up to and
// including distance_max (within rounding).
std::vector<double> sweep_distances(const SweepPlanConfig& plan);

}  // namespace keyrate
