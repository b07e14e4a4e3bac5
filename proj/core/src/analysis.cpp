// SPDX-License-Identifier: Apache-2.0

#include "keyrate/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "keyrate/errors.hpp"
#include "keyrate/parallel.hpp"
#include "keyrate/preprocess.hpp"
#include "keyrate/rng.hpp"

namespace keyrate {

namespace {

// Labels for deriving one jitter stream per (position, variant, pair).
enum PairIndex : std::uint64_t { kPairXY = 0, kPairXZ = 1, kPairYZ = 2 };

std::string full_precision(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

VariantMetrics metrics_for_variant(const TraceSet& trace, const EstimatorConfig& estimator,
                                   std::size_t position_index, unsigned threads) {
    VariantMetrics metrics;
    metrics.variant = trace.variant;
    metrics.sample_count = trace.length();
    metrics.iid_approximation = trace.variant != Variant::downsampled;

    const std::vector<double>& x = trace.x.values;
    const std::vector<double>& y = trace.y.values;
    const std::vector<double>& z = trace.z.values;

    metrics.rho_xy = pearson(x, y);
    metrics.rho_xz = pearson(x, z);
    metrics.rho_yz = pearson(y, z);

    const auto variant_index = static_cast<std::uint64_t>(trace.variant);
    const auto pair_seed = [&](PairIndex pair) {
        return mix_seed(estimator.seed, static_cast<std::uint64_t>(position_index), variant_index,
                        static_cast<std::uint64_t>(pair));
    };
    metrics.i_xy = ksg_mutual_information(x, y, estimator.neighbor_k, estimator.jitter_amplitude,
                                          pair_seed(kPairXY), threads);
    metrics.i_xz = ksg_mutual_information(x, z, estimator.neighbor_k, estimator.jitter_amplitude,
                                          pair_seed(kPairXZ), threads);
    metrics.i_yz = ksg_mutual_information(y, z, estimator.neighbor_k, estimator.jitter_amplitude,
                                          pair_seed(kPairYZ), threads);
    metrics.r_sk = secret_key_rate(metrics.i_xy.value, metrics.i_xz.value, metrics.i_yz.value);
    return metrics;
}

}  // namespace

double secret_key_rate(double i_xy, double i_xz, double i_yz) {
    if (!std::isfinite(i_xy) || !std::isfinite(i_xz) || !std::isfinite(i_yz))
        throw DomainError("secret_key_rate: inputs must be finite");
    return i_xy - std::min(i_xz, i_yz);
}

PositionMetrics analyze_position(const TraceSet& trace, const PipelineConfig& pipeline,
                                 const EstimatorConfig& estimator, std::size_t position_index,
                                 unsigned threads) {
    if (trace.variant != Variant::original)
        throw DomainError(std::string("analyze_position: trace variant must be original, got ") +
                          variant_name(trace.variant));

    PositionMetrics position;
    position.eve_distance = trace.eve_distance;

    const TraceSet downsampled =
        process_traceset(trace, ProcessingMethod::downsample, pipeline.downsample_factor);
    const TraceSet decorrelated =
        process_traceset(trace, ProcessingMethod::decorrelate, pipeline.decorrelation_order);

    position.variants[static_cast<std::size_t>(Variant::original)] =
        metrics_for_variant(trace, estimator, position_index, threads);
    position.variants[static_cast<std::size_t>(Variant::downsampled)] =
        metrics_for_variant(downsampled, estimator, position_index, threads);
    position.variants[static_cast<std::size_t>(Variant::decorrelated)] =
        metrics_for_variant(decorrelated, estimator, position_index, threads);
    return position;
}

SweepReport analyze_sweep(const SweepDataset& sweep, const PipelineConfig& pipeline,
                          const EstimatorConfig& estimator, unsigned threads) {
    const ValidationReport validation = validate_sweep(sweep);
    if (!validation.all_passed()) {
        std::string detail;
        for (const auto& check : validation.checks)
            if (!check.passed) {
                detail = check.name + (check.message.empty() ? "" : " (" + check.message + ")");
                break;
            }
        throw DomainError("analyze_sweep: campaign failed validation: " + detail);
    }

    SweepReport report;
    report.positions.resize(sweep.positions.size());
    report.wavelength = sweep.positions.front().wavelength;
    report.ab_distance = sweep.positions.front().ab_distance;
    report.samples_per_step = sweep.samples_per_step;
    report.pipeline = pipeline;
    report.estimator = estimator;

    // Positions run concurrently; the estimator itself stays single-threaded
    // inside to avoid oversubscription. Results land in order-preserving
    // slots, so the partition cannot affect the report.
    parallel_for(sweep.positions.size(), threads, [&](std::size_t i) {
        try {
            report.positions[i] = analyze_position(sweep.positions[i], pipeline, estimator, i, 1);
        } catch (const std::exception& e) {
            char distance[32];
            std::snprintf(distance, sizeof distance, "%.4f", sweep.positions[i].eve_distance);
            throw Error("analyze_sweep: position " + std::to_string(i) + " (" + distance +
                        " m) failed: " + e.what());
        }
    });
    return report;
}

SummaryTable summarize(const SweepReport& report) {
    if (report.positions.empty()) throw DomainError("summarize: report has no positions");
    SummaryTable table;
    table.position_count = report.positions.size();
    const double n = static_cast<double>(report.positions.size());
    for (std::size_t v = 0; v < kVariantCount; ++v) {
        SummaryRow& row = table.per_variant[v];
        for (const PositionMetrics& p : report.positions) {
            const VariantMetrics& m = p.variants[v];
            row.rho_xy += m.rho_xy;
            row.rho_yz += m.rho_yz;
            row.i_xy += m.i_xy.value;
            row.i_yz += m.i_yz.value;
            row.r_sk += m.r_sk;
        }
        row.rho_xy /= n;
        row.rho_yz /= n;
        row.i_xy /= n;
        row.i_yz /= n;
        row.r_sk /= n;
    }
    return table;
}

std::string report_to_csv(const SweepReport& report) {
    std::string out =
        "distance_m,variant,rho_xy,rho_xz,rho_yz,i_xy,i_xz,i_yz,r_sk,"
        "r_sk_clamped,iid_approximation,neighbor_k,sample_count,jitter_amplitude\n";
    for (const PositionMetrics& p : report.positions) {
        for (std::size_t v = 0; v < kVariantCount; ++v) {
            const VariantMetrics& m = p.variants[v];
            out += full_precision(p.eve_distance);
            out += ',';
            out += variant_name(m.variant);
            out += ',';
            out += full_precision(m.rho_xy);
            out += ',';
            out += full_precision(m.rho_xz);
            out += ',';
            out += full_precision(m.rho_yz);
            out += ',';
            out += full_precision(m.i_xy.value);
            out += ',';
            out += full_precision(m.i_xz.value);
            out += ',';
            out += full_precision(m.i_yz.value);
            out += ',';
            out += full_precision(m.r_sk);
            out += ',';
            out += full_precision(std::max(m.r_sk, 0.0));
            out += ',';
            out += m.iid_approximation ? '1' : '0';
            out += ',';
            out += std::to_string(m.i_xy.neighbor_k);
            out += ',';
            out += std::to_string(m.sample_count);
            out += ',';
            out += full_precision(m.i_xy.jitter_amplitude);
            out += '\n';
        }
    }
    return out;
}

std::string summary_to_csv(const SummaryTable& table) {
    const auto row = [&](const char* name, double SummaryRow::* field) {
        std::string line = name;
        for (std::size_t v = 0; v < kVariantCount; ++v) {
            line += ',';
            line += full_precision(table.per_variant[v].*field);
        }
        return line + "\n";
    };
    std::string out = "metric,original,downsampled,decorrelated\n";
    out += row("rho_xy", &SummaryRow::rho_xy);
    out += row("rho_yz", &SummaryRow::rho_yz);
    out += row("i_xy", &SummaryRow::i_xy);
    out += row("i_yz", &SummaryRow::i_yz);
    out += row("r_sk", &SummaryRow::r_sk);
    return out;
}

namespace {

nlohmann::ordered_json estimate_to_json(const MIEstimate& e) {
    return {{"bits", e.value},
            {"neighbor_k", e.neighbor_k},
            {"sample_count", e.sample_count},
            {"jitter_amplitude", e.jitter_amplitude},
            {"jitter_seed", e.jitter_seed}};
}

}  // namespace

std::string report_to_json(const SweepReport& report) {
    nlohmann::ordered_json doc;
    doc["campaign"] = {{"wavelength_m", report.wavelength},
                       {"ab_distance_m", report.ab_distance},
                       {"samples_per_step", report.samples_per_step},
                       {"downsample_factor", report.pipeline.downsample_factor},
                       {"decorrelation_order", report.pipeline.decorrelation_order},
                       {"neighbor_k", report.estimator.neighbor_k},
                       {"campaign_seed", report.estimator.seed},
                       {"position_count", report.positions.size()}};
    nlohmann::ordered_json positions = nlohmann::ordered_json::array();
    for (const PositionMetrics& p : report.positions) {
        nlohmann::ordered_json entry;
        entry["distance_m"] = p.eve_distance;
        for (std::size_t v = 0; v < kVariantCount; ++v) {
            const VariantMetrics& m = p.variants[v];
            entry["variants"][variant_name(m.variant)] = {
                {"rho_xy", m.rho_xy},
                {"rho_xz", m.rho_xz},
                {"rho_yz", m.rho_yz},
                {"i_xy", estimate_to_json(m.i_xy)},
                {"i_xz", estimate_to_json(m.i_xz)},
                {"i_yz", estimate_to_json(m.i_yz)},
                {"r_sk", m.r_sk},
                {"r_sk_clamped", std::max(m.r_sk, 0.0)},
                {"iid_approximation", m.iid_approximation},
                {"sample_count", m.sample_count}};
        }
        positions.push_back(std::move(entry));
    }
    doc["positions"] = std::move(positions);
    return doc.dump(2) + "\n";
}

namespace {

void write_text_file(const std::string& content, const std::filesystem::path& path,
                     const char* what) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) throw IoError(std::string("cannot write ") + what + " to " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError(std::string("failed while writing ") + path.string());
}

}  // namespace

void write_report_csv(const SweepReport& report, const std::filesystem::path& path) {
    write_text_file(report_to_csv(report), path, "sweep report CSV");
}

void write_report_json(const SweepReport& report, const std::filesystem::path& path) {
    write_text_file(report_to_json(report), path, "sweep report JSON");
}

void write_summary_csv(const SummaryTable& table, const std::filesystem::path& path) {
    write_text_file(summary_to_csv(table), path, "summary CSV");
}

}  // namespace keyrate
