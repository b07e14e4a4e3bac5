// SPDX-License-Identifier: Apache-2.0

#include "keyrate/trace.hpp"

#include <cmath>
#include <sstream>

#include "keyrate/errors.hpp"

namespace keyrate {

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::original: return "original";
        case Variant::downsampled: return "downsampled";
        case Variant::decorrelated: return "decorrelated";
    }
    return "unknown";
}

std::optional<Variant> variant_from_name(const std::string& name) {
    if (name == "original") return Variant::original;
    if (name == "downsampled") return Variant::downsampled;
    if (name == "decorrelated") return Variant::decorrelated;
    return std::nullopt;
}

void use_secondary_eve(TraceSet& trace) {
    if (!trace.z_secondary)
        throw DomainError("use_secondary_eve: trace has no secondary eavesdropper channel");
    std::swap(trace.z, *trace.z_secondary);
}

bool ValidationReport::all_passed() const {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

std::string ValidationReport::to_string() const {
    std::ostringstream out;
    for (const auto& c : checks) {
        out << (c.passed ? "[pass] " : "[FAIL] ") << c.name;
        if (!c.message.empty()) out << ": " << c.message;
        out << '\n';
    }
    return out.str();
}

namespace {

void check_finite(ValidationReport& report, const TimeSeries& s, const std::string& label) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!std::isfinite(s.values[i])) {
            report.checks.push_back({"finiteness", false,
                                     label + " has a non-finite value at index " + std::to_string(i)});
            return;
        }
    }
    report.checks.push_back({"finiteness", true, label + " all finite"});
}

}  // namespace

ValidationReport validate_trace(const TraceSet& t) {
    ValidationReport report;

    const std::size_t n = t.x.size();
    bool aligned = true;
    if (t.y.size() != n) {
        report.checks.push_back({"length alignment", false,
                                 "y has length " + std::to_string(t.y.size()) + ", expected " +
                                     std::to_string(n)});
        aligned = false;
    }
    if (t.z.size() != n) {
        report.checks.push_back({"length alignment", false,
                                 "z has length " + std::to_string(t.z.size()) + ", expected " +
                                     std::to_string(n)});
        aligned = false;
    }
    if (t.z_secondary && t.z_secondary->size() != n) {
        report.checks.push_back({"length alignment", false,
                                 "z_secondary has length " + std::to_string(t.z_secondary->size()) +
                                     ", expected " + std::to_string(n)});
        aligned = false;
    }
    if (aligned) report.checks.push_back({"length alignment", true, ""});

    bool intervals_match = t.y.sampling_interval == t.x.sampling_interval &&
                           t.z.sampling_interval == t.x.sampling_interval &&
                           (!t.z_secondary || t.z_secondary->sampling_interval == t.x.sampling_interval);
    report.checks.push_back({"sampling interval alignment", intervals_match,
                             intervals_match ? "" : "components disagree on sampling_interval"});

    report.checks.push_back({"sampling interval positive", t.x.sampling_interval > 0.0,
                             t.x.sampling_interval > 0.0
                                 ? ""
                                 : "sampling_interval = " + std::to_string(t.x.sampling_interval)});

    report.checks.push_back(
        {"minimum sample count", n >= 2,
         n >= 2 ? "" : "length " + std::to_string(n) + " is below the analyzable minimum of 2"});

    check_finite(report, t.x, "x");
    check_finite(report, t.y, "y");
    check_finite(report, t.z, "z");
    if (t.z_secondary) check_finite(report, *t.z_secondary, "z_secondary");

    const bool geometry_ok = t.eve_distance >= 0.0 && t.ab_distance > 0.0 && t.wavelength > 0.0;
    report.checks.push_back({"geometry", geometry_ok,
                             geometry_ok ? ""
                                         : "requires eve_distance >= 0, ab_distance > 0, wavelength > 0"});

    return report;
}

ValidationReport validate_sweep(const SweepDataset& sweep) {
    ValidationReport report;

    if (sweep.positions.empty()) {
        report.checks.push_back({"non-empty campaign", false, "sweep has no positions"});
        return report;
    }
    report.checks.push_back({"non-empty campaign", true, ""});

    bool monotone = true;
    for (std::size_t i = 1; i < sweep.positions.size(); ++i) {
        if (sweep.positions[i].eve_distance <= sweep.positions[i - 1].eve_distance) {
            report.checks.push_back({"monotone distances", false,
                                     "position " + std::to_string(i) + " distance " +
                                         std::to_string(sweep.positions[i].eve_distance) +
                                         " does not exceed its predecessor"});
            monotone = false;
            break;
        }
    }
    if (monotone) report.checks.push_back({"monotone distances", true, ""});

    const TraceSet& first = sweep.positions.front();
    for (std::size_t i = 1; i < sweep.positions.size(); ++i) {
        const TraceSet& t = sweep.positions[i];
        if (t.variant != first.variant || t.wavelength != first.wavelength ||
            t.ab_distance != first.ab_distance) {
            report.checks.push_back({"uniform campaign metadata", false,
                                     "position " + std::to_string(i) +
                                         " differs in variant/wavelength/geometry"});
            break;
        }
        if (i + 1 == sweep.positions.size())
            report.checks.push_back({"uniform campaign metadata", true, ""});
    }
    if (sweep.positions.size() == 1)
        report.checks.push_back({"uniform campaign metadata", true, ""});

    for (std::size_t i = 0; i < sweep.positions.size(); ++i) {
        if (sweep.positions[i].length() != first.length()) {
            report.checks.push_back({"uniform trace length", false,
                                     "position " + std::to_string(i) + " has length " +
                                         std::to_string(sweep.positions[i].length()) + ", expected " +
                                         std::to_string(first.length())});
            break;
        }
        if (i + 1 == sweep.positions.size())
            report.checks.push_back({"uniform trace length", true, ""});
    }

    for (std::size_t i = 0; i < sweep.positions.size(); ++i) {
        ValidationReport inner = validate_trace(sweep.positions[i]);
        for (auto& c : inner.checks) {
            if (!c.passed) {
                c.message = "position " + std::to_string(i) + ": " + c.message;
                report.checks.push_back(std::move(c));
            }
        }
    }

    return report;
}

}  // namespace keyrate
