// SPDX-License-Identifier: Apache-2.0

#include "keyrate/trace_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "keyrate/errors.hpp"

namespace fs = std::filesystem;

namespace keyrate {

namespace {

constexpr const char* kMetaFileName = "meta.toml";

std::string format_full_precision(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parse_double_field(std::string_view field, const fs::path& path, std::size_t line_no,
                          const char* what) {
    field = trim(field);
    double value = 0.0;
    const auto result = std::from_chars(field.data(), field.data() + field.size(), value);
    if (result.ec != std::errc{} || result.ptr != field.data() + field.size())
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": non-numeric " + what +
                         " field '" + std::string(field) + "'");
    return value;
}

long long parse_index_field(std::string_view field, const fs::path& path, std::size_t line_no) {
    field = trim(field);
    long long value = 0;
    const auto result = std::from_chars(field.data(), field.data() + field.size(), value);
    if (result.ec != std::errc{} || result.ptr != field.data() + field.size())
        throw ParseError(path.string() + ":" + std::to_string(line_no) +
                         ": sample index 'k' is not an integer: '" + std::string(field) + "'");
    return value;
}

std::vector<std::string_view> split_csv_row(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

// Returns the eavesdropper distance encoded in a `pos_<mm>.csv` name, if any.
std::optional<double> distance_from_position_name(const fs::path& path) {
    const std::string name = path.filename().string();
    if (name.size() < 9 || name.rfind("pos_", 0) != 0) return std::nullopt;
    if (name.substr(name.size() - 4) != ".csv") return std::nullopt;
    const std::string digits = name.substr(4, name.size() - 8);
    if (digits.empty()) return std::nullopt;
    for (char c : digits)
        if (c < '0' || c > '9') return std::nullopt;
    return std::stod(digits) / 1000.0;
}

}  // namespace

SweepMeta load_meta(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open metadata file " + path.string());
    SweepMeta meta;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        const std::size_t eq = sv.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": expected 'key = value'");
        const std::string key{trim(sv.substr(0, eq))};
        const std::string_view value = trim(sv.substr(eq + 1));
        if (key == "wavelength_m")
            meta.wavelength_m = parse_double_field(value, path, line_no, "wavelength_m");
        else if (key == "ab_distance_m")
            meta.ab_distance_m = parse_double_field(value, path, line_no, "ab_distance_m");
        else if (key == "sampling_interval_s")
            meta.sampling_interval_s = parse_double_field(value, path, line_no, "sampling_interval_s");
        else if (key == "samples_per_step")
            meta.samples_per_step = static_cast<std::size_t>(
                parse_double_field(value, path, line_no, "samples_per_step"));
        else if (key == "step_size_m")
            meta.step_size_m = parse_double_field(value, path, line_no, "step_size_m");
        // Unknown keys are tolerated: sidecars may carry extra annotations.
    }
    return meta;
}

void save_meta(const SweepMeta& meta, const fs::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write metadata file " + path.string());
    out << "wavelength_m = " << format_full_precision(meta.wavelength_m) << '\n'
        << "ab_distance_m = " << format_full_precision(meta.ab_distance_m) << '\n'
        << "sampling_interval_s = " << format_full_precision(meta.sampling_interval_s) << '\n'
        << "samples_per_step = " << meta.samples_per_step << '\n'
        << "step_size_m = " << format_full_precision(meta.step_size_m) << '\n';
    if (!out) throw IoError("failed while writing " + path.string());
}

TraceSet load_trace(const fs::path& path, TraceFormat format) {
    (void)format;  // single supported format
    std::ifstream in(path);
    if (!in) throw IoError("cannot open trace file " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw EmptyInputError("trace file " + path.string() + " is empty");

    const auto header = split_csv_row(trim(line));
    const bool has_secondary = header.size() == 5;
    const bool header_ok =
        (header.size() == 4 || has_secondary) && trim(header[0]) == "k" && trim(header[1]) == "x" &&
        trim(header[2]) == "y" && trim(header[3]) == "z" &&
        (!has_secondary || trim(header[4]) == "z2");
    if (!header_ok) {
        std::string got{trim(line)};
        throw ParseError(path.string() + ":1: expected header 'k,x,y,z' or 'k,x,y,z,z2', got '" +
                         got + "'");
    }
    const std::size_t arity = header.size();

    TraceSet trace;
    if (has_secondary) trace.z_secondary.emplace();

    std::size_t line_no = 1;
    long long expected_k = -1;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view sv = trim(line);
        if (sv.empty()) continue;
        const auto fields = split_csv_row(sv);
        if (fields.size() != arity)
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(arity) + " fields, got " + std::to_string(fields.size()));
        const long long k = parse_index_field(fields[0], path, line_no);
        if (expected_k < 0) {
            // A nonzero start usually means the file head was cut off.
            if (k != 0)
                throw ParseError(path.string() + ":" + std::to_string(line_no) +
                                 ": sample index must start at 0, got " + std::to_string(k));
        } else if (k != expected_k) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": sample index must increase by 1 (expected " +
                             std::to_string(expected_k) + ", got " + std::to_string(k) + ")");
        }
        expected_k = k + 1;
        trace.x.values.push_back(parse_double_field(fields[1], path, line_no, "x"));
        trace.y.values.push_back(parse_double_field(fields[2], path, line_no, "y"));
        trace.z.values.push_back(parse_double_field(fields[3], path, line_no, "z"));
        if (has_secondary)
            trace.z_secondary->values.push_back(parse_double_field(fields[4], path, line_no, "z2"));
    }

    if (trace.x.values.empty())
        throw EmptyInputError("trace file " + path.string() + " has a header but no data rows");

    trace.variant = Variant::original;
    trace.provenance = path.string();

    const fs::path meta_path = path.parent_path() / kMetaFileName;
    std::error_code ec;
    if (fs::exists(meta_path, ec) && !ec) {
        const SweepMeta meta = load_meta(meta_path);
        trace.wavelength = meta.wavelength_m;
        trace.ab_distance = meta.ab_distance_m;
        trace.x.sampling_interval = meta.sampling_interval_s;
    }
    trace.y.sampling_interval = trace.x.sampling_interval;
    trace.z.sampling_interval = trace.x.sampling_interval;
    if (trace.z_secondary) trace.z_secondary->sampling_interval = trace.x.sampling_interval;

    if (const auto d = distance_from_position_name(path)) trace.eve_distance = *d;

    return trace;
}

void save_trace(const TraceSet& trace, const fs::path& path, TraceFormat format) {
    (void)format;
    const std::size_t n = trace.length();
    if (trace.y.size() != n || trace.z.size() != n ||
        (trace.z_secondary && trace.z_secondary->size() != n))
        throw DomainError("save_trace: trace components have mismatched lengths");

    std::string body;
    body.reserve(n * 64 + 16);
    body += trace.z_secondary ? "k,x,y,z,z2\n" : "k,x,y,z\n";
    char buf[40];
    for (std::size_t i = 0; i < n; ++i) {
        body += std::to_string(i);
        std::snprintf(buf, sizeof buf, ",%.17g", trace.x.values[i]);
        body += buf;
        std::snprintf(buf, sizeof buf, ",%.17g", trace.y.values[i]);
        body += buf;
        std::snprintf(buf, sizeof buf, ",%.17g", trace.z.values[i]);
        body += buf;
        if (trace.z_secondary) {
            std::snprintf(buf, sizeof buf, ",%.17g", trace.z_secondary->values[i]);
            body += buf;
        }
        body += '\n';
    }

    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) throw IoError("cannot write trace file " + path.string());
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!out) throw IoError("failed while writing " + path.string());
}

SweepDataset load_sweep(const fs::path& directory) {
    std::error_code ec;
    if (!fs::is_directory(directory, ec) || ec)
        throw IoError("sweep directory " + directory.string() + " does not exist");

    std::vector<std::pair<double, fs::path>> files;
    for (const auto& entry : fs::directory_iterator(directory)) {
        if (!entry.is_regular_file()) continue;
        if (const auto d = distance_from_position_name(entry.path()))
            files.emplace_back(*d, entry.path());
    }
    if (files.empty())
        throw EmptyInputError("sweep directory " + directory.string() +
                              " contains no pos_<mm>.csv files");

    std::sort(files.begin(), files.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < files.size(); ++i) {
        if (files[i].first == files[i - 1].first)
            throw ParseError("duplicate eavesdropper distance in " + directory.string() + ": " +
                             files[i - 1].second.filename().string() + " and " +
                             files[i].second.filename().string());
    }

    SweepDataset sweep;
    sweep.positions.reserve(files.size());
    for (const auto& [distance, path] : files) {
        TraceSet t = load_trace(path);
        t.eve_distance = distance;
        sweep.positions.push_back(std::move(t));
    }

    const fs::path meta_path = directory / kMetaFileName;
    if (fs::exists(meta_path, ec) && !ec) {
        const SweepMeta meta = load_meta(meta_path);
        sweep.samples_per_step = meta.samples_per_step;
        sweep.step_size = meta.step_size_m;
    }
    if (sweep.samples_per_step == 0) sweep.samples_per_step = sweep.positions.front().length();
    if (sweep.step_size == 0.0 && sweep.positions.size() >= 2)
        sweep.step_size = sweep.positions[1].eve_distance - sweep.positions[0].eve_distance;

    return sweep;
}

void save_sweep(const SweepDataset& sweep, const fs::path& directory) {
    std::error_code ec;
    fs::create_directories(directory, ec);
    if (ec) throw IoError("cannot create sweep directory " + directory.string());

    std::map<long long, double> seen;
    for (const TraceSet& t : sweep.positions) {
        const long long mm = std::llround(t.eve_distance * 1000.0);
        if (mm < 0 || mm > 9999)
            throw IoError("save_sweep: distance " + std::to_string(t.eve_distance) +
                          " m is outside the file-name range [0, 9.999] m");
        const auto [it, inserted] = seen.emplace(mm, t.eve_distance);
        if (!inserted)
            throw IoError("save_sweep: positions " + std::to_string(it->second) + " m and " +
                          std::to_string(t.eve_distance) + " m collide at pos_" +
                          std::to_string(mm) + ".csv");
        char name[16];
        std::snprintf(name, sizeof name, "pos_%04lld.csv", mm);
        save_trace(t, directory / name);
    }

    SweepMeta meta;
    if (!sweep.positions.empty()) {
        const TraceSet& first = sweep.positions.front();
        meta.wavelength_m = first.wavelength;
        meta.ab_distance_m = first.ab_distance;
        meta.sampling_interval_s = first.x.sampling_interval;
    }
    meta.samples_per_step = sweep.samples_per_step;
    meta.step_size_m = sweep.step_size;
    save_meta(meta, directory / kMetaFileName);
}

}  // namespace keyrate
