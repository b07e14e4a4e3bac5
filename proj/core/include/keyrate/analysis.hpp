// SPDX-License-Identifier: Apache-2.0
//
// Secret-key-rate analysis over traces and campaigns: the lower bound
// R_sk = I(X;Y) - min(I(X;Z), I(Y;Z)), per-position metric bundles covering
// all three processing variants, whole-sweep reports, and campaign summaries,
// plus their CSV and JSON serializations.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "keyrate/estimators.hpp"
#include "keyrate/trace.hpp"

namespace keyrate {

// Lower bound on the extractable secret-key rate from estimated mutual
// informations, in bits/observation: i_xy - min(i_xz, i_yz). Deliberately
// not clamped at 0 — noisy estimates may dip below, and hiding that would
// mask estimator error. Throws DomainError on non-finite input.
double secret_key_rate(double i_xy, double i_xz, double i_yz);

// Processing applied before analysis: decimation keeps every Nth sample,
// decorrelation keeps the order-N prediction residual.
struct PipelineConfig {
    std::size_t downsample_factor = 30;
    std::size_t decorrelation_order = 30;
};

// k-NN estimator settings shared by a whole campaign. `seed` is the campaign
// seed: each estimate derives its own jitter stream from (seed, position
// index, variant, pair), so re-running one position reproduces the
// full-campaign values.
struct EstimatorConfig {
    std::size_t neighbor_k = 4;
    double jitter_amplitude = kAutoJitterAmplitude;  // < 0 selects auto
    std::uint64_t seed = 1;
};

// All metrics for one processing variant of one position.
struct VariantMetrics {
    Variant variant = Variant::original;
    double rho_xy = 0.0, rho_xz = 0.0, rho_yz = 0.0;
    MIEstimate i_xy, i_xz, i_yz;
    double r_sk = 0.0;  // = i_xy.value - min(i_xz.value, i_yz.value), exactly
    // True when the variant's samples are not i.i.d. (original keeps temporal
    // dependence; decorrelation only removes linear dependence), so the MI
    // values are approximations.
    bool iid_approximation = false;
    std::size_t sample_count = 0;
};

// Metrics for every variant at one eavesdropper position.
struct PositionMetrics {
    double eve_distance = 0.0;
    std::array<VariantMetrics, kVariantCount> variants{};  // indexed by Variant
};

// One campaign's worth of per-position metrics plus the settings that
// produced them.
struct SweepReport {
    std::vector<PositionMetrics> positions;  // ascending eve_distance
    double wavelength = 0.0;
    double ab_distance = 0.0;
    std::size_t samples_per_step = 0;
    PipelineConfig pipeline;
    EstimatorConfig estimator;
};

// Per-variant means over positions of the headline metrics.
struct SummaryRow {
    double rho_xy = 0.0, rho_yz = 0.0, i_xy = 0.0, i_yz = 0.0, r_sk = 0.0;
};

struct SummaryTable {
    std::array<SummaryRow, kVariantCount> per_variant{};  // indexed by Variant
    std::size_t position_count = 0;
};

// Computes all three variants from one original-variant trace: the trace
// itself, its decimation by pipeline.downsample_factor, and its
// order-pipeline.decorrelation_order innovation. `threads` parallelizes the
// k-NN estimation within each estimate (0 = hardware); results are identical
// for every thread count.
// Throws DomainError if the trace is not original-variant or too short.
PositionMetrics analyze_position(const TraceSet& trace, const PipelineConfig& pipeline,
                                 const EstimatorConfig& estimator, std::size_t position_index = 0,
                                 unsigned threads = 1);

// Analyzes every position of a validated campaign, concurrently across
// positions (threads = 0 means hardware), preserving order. A failing
// position aborts the run with an error naming it.
SweepReport analyze_sweep(const SweepDataset& sweep, const PipelineConfig& pipeline,
                          const EstimatorConfig& estimator, unsigned threads = 0);

// Arithmetic means per variant over all positions.
// Throws DomainError for an empty report.
SummaryTable summarize(const SweepReport& report);

// CSV serialization, one row per position x variant. Fixed leading columns:
//   distance_m,variant,rho_xy,rho_xz,rho_yz,i_xy,i_xz,i_yz,r_sk
// Further columns only ever get appended (currently r_sk_clamped,
// iid_approximation, neighbor_k, sample_count, jitter_amplitude).
std::string report_to_csv(const SweepReport& report);

// JSON serialization including full estimator metadata per estimate.
std::string report_to_json(const SweepReport& report);

// CSV summary: one row per headline metric, one column per variant.
std::string summary_to_csv(const SummaryTable& table);

void write_report_csv(const SweepReport& report, const std::filesystem::path& path);
void write_report_json(const SweepReport& report, const std::filesystem::path& path);
void write_summary_csv(const SummaryTable& table, const std::filesystem::path& path);

}  // namespace keyrate
