// SPDX-License-Identifier: Apache-2.0

#include "keyrate/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "keyrate/errors.hpp"

namespace keyrate {

namespace {

std::string strip(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::size_t start = 0;
    while (start <= value.size()) {
        std::size_t comma = value.find(',', start);
        if (comma == std::string::npos) comma = value.size();
        const std::string item = strip(value.substr(start, comma - start));
        if (!item.empty()) items.push_back(item);
        if (comma == value.size()) break;
        start = comma + 1;
    }
    return items;
}

struct FieldContext {
    const std::string& origin;
    std::size_t line_no;
    const std::string& section;
    const std::string& key;

    [[noreturn]] void fail(const std::string& why) const {
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": field [" + section + "] " +
                          key + ": " + why);
    }
};

double parse_number(const FieldContext& ctx, const std::string& value) {
    double v = 0.0;
    const std::string t = strip(value);
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
        ctx.fail("expected a number, got '" + t + "'");
    return v;
}

std::uint64_t parse_u64(const FieldContext& ctx, const std::string& value) {
    std::uint64_t v = 0;
    const std::string t = strip(value);
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
        ctx.fail("expected a non-negative integer, got '" + t + "'");
    return v;
}

std::size_t parse_count(const FieldContext& ctx, const std::string& value) {
    return static_cast<std::size_t>(parse_u64(ctx, value));
}

bool parse_bool(const FieldContext& ctx, const std::string& value) {
    const std::string t = strip(value);
    if (t == "true" || t == "yes" || t == "1") return true;
    if (t == "false" || t == "no" || t == "0") return false;
    ctx.fail("expected true/false, got '" + t + "'");
}

std::vector<double> parse_number_list(const FieldContext& ctx, const std::string& value) {
    std::vector<double> out;
    for (const std::string& item : split_list(value)) out.push_back(parse_number(ctx, item));
    return out;
}

void apply_channel(RunConfig& config, const FieldContext& ctx, const std::string& value) {
    ChannelConfig& ch = config.channel;
    const std::string& key = ctx.key;
    if (key == "wavelength_m")
        ch.wavelength = parse_number(ctx, value);
    else if (key == "ab_correlation")
        ch.ab_correlation = parse_number(ctx, value);
    else if (key == "spatial_mode") {
        const std::string t = strip(value);
        if (t == "ideal_jakes")
            ch.spatial_profile.mode = SpatialMode::ideal_jakes;
        else if (t == "empirical_table")
            ch.spatial_profile.mode = SpatialMode::empirical_table;
        else if (t == "shifted_peak")
            ch.spatial_profile.mode = SpatialMode::shifted_peak;
        else
            ctx.fail("expected ideal_jakes|empirical_table|shifted_peak, got '" + t + "'");
    } else if (key == "spatial_table") {
        ch.spatial_profile.table.clear();
        for (const std::string& item : split_list(value)) {
            const std::size_t colon = item.find(':');
            if (colon == std::string::npos)
                ctx.fail("expected 'distance:correlation' pairs, got '" + item + "'");
            const double d = parse_number(ctx, item.substr(0, colon));
            const double c = parse_number(ctx, item.substr(colon + 1));
            ch.spatial_profile.table.emplace_back(d, c);
        }
    } else if (key == "peak_distance_m")
        ch.spatial_profile.peak_distance = parse_number(ctx, value);
    else if (key == "ar_coefficients")
        ch.temporal.ar_coefficients = parse_number_list(ctx, value);
    else if (key == "cyclic_mode") {
        const std::string t = strip(value);
        if (t == "none")
            ch.temporal.cyclic_mode = CyclicMode::none;
        else if (t == "continuous")
            ch.temporal.cyclic_mode = CyclicMode::continuous;
        else if (t == "randomized")
            ch.temporal.cyclic_mode = CyclicMode::randomized;
        else
            ctx.fail("expected none|continuous|randomized, got '" + t + "'");
    } else if (key == "cyclic_period")
        ch.temporal.cyclic_period = parse_count(ctx, value);
    else if (key == "cyclic_amplitude_db")
        ch.temporal.cyclic_amplitude = parse_number(ctx, value);
    else if (key == "quantization_step_db")
        ch.quantization_step = parse_number(ctx, value);
    else if (key == "noise_floor_std_db")
        ch.noise_floor_std = parse_number(ctx, value);
    else if (key == "sampling_interval_s")
        ch.sampling_interval = parse_number(ctx, value);
    else if (key == "seed")
        ch.seed = parse_u64(ctx, value);
    else
        ctx.fail("unknown key");
}

void apply_pipeline(RunConfig& config, const FieldContext& ctx, const std::string& value) {
    if (ctx.key == "downsample_factor")
        config.pipeline.downsample_factor = parse_count(ctx, value);
    else if (ctx.key == "decorrelation_order")
        config.pipeline.decorrelation_order = parse_count(ctx, value);
    else
        ctx.fail("unknown key");
}

void apply_estimator(RunConfig& config, const FieldContext& ctx, const std::string& value) {
    if (ctx.key == "neighbor_k")
        config.estimator.neighbor_k = parse_count(ctx, value);
    else if (ctx.key == "jitter_amplitude") {
        const std::string t = strip(value);
        if (t == "auto") {
            config.estimator.jitter_amplitude = kAutoJitterAmplitude;
        } else {
            const double v = parse_number(ctx, value);
            if (v < 0.0) ctx.fail("jitter amplitude must be >= 0 or 'auto'");
            config.estimator.jitter_amplitude = v;
        }
    } else
        ctx.fail("unknown key");
}

void apply_sweep(RunConfig& config, const FieldContext& ctx, const std::string& value) {
    SweepPlanConfig& plan = config.sweep;
    if (ctx.key == "distance_be_range_m") {
        const std::vector<double> range = parse_number_list(ctx, value);
        if (range.size() != 2) ctx.fail("expected 'min, max'");
        plan.distance_min = range[0];
        plan.distance_max = range[1];
    } else if (ctx.key == "step_size_m")
        plan.step = parse_number(ctx, value);
    else if (ctx.key == "samples_per_step")
        plan.samples_per_step = parse_count(ctx, value);
    else if (ctx.key == "distance_ab_m")
        plan.ab_distance = parse_number(ctx, value);
    else
        ctx.fail("unknown key");
}

void apply_io(RunConfig& config, const FieldContext& ctx, const std::string& value) {
    if (ctx.key == "use_secondary_eve")
        config.io.use_secondary_eve = parse_bool(ctx, value);
    else
        ctx.fail("unknown key");
}

}  // namespace

void RunConfig::validate() const {
    channel.validate();
    if (pipeline.downsample_factor == 0)
        throw ConfigError("config: [pipeline] downsample_factor must be >= 1");
    if (pipeline.decorrelation_order == 0)
        throw ConfigError("config: [pipeline] decorrelation_order must be >= 1");
    if (estimator.neighbor_k == 0)
        throw ConfigError("config: [estimator] neighbor_k must be >= 1");
    if (!(sweep.step > 0.0)) throw ConfigError("config: [sweep] step_size_m must be > 0");
    if (!(sweep.distance_min >= 0.0))
        throw ConfigError("config: [sweep] distance_be_range_m minimum must be >= 0");
    if (!(sweep.distance_max >= sweep.distance_min))
        throw ConfigError("config: [sweep] distance_be_range_m must satisfy min <= max");
    if (sweep.samples_per_step < 2)
        throw ConfigError("config: [sweep] samples_per_step must be >= 2");
    if (!(sweep.ab_distance > 0.0))
        throw ConfigError("config: [sweep] distance_ab_m must be > 0");
}

RunConfig parse_run_config(const std::string& text, const std::string& origin) {
    RunConfig config;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = strip(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(line_no) +
                                  ": malformed section header '" + line + "'");
            section = strip(line.substr(1, line.size() - 2));
            if (section != "channel" && section != "pipeline" && section != "estimator" &&
                section != "sweep" && section != "io")
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": unknown section [" +
                                  section + "]");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected 'key = value', got '" +
                              line + "'");
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        if (section.empty())
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": key '" + key +
                              "' appears before any [section]");
        const FieldContext ctx{origin, line_no, section, key};
        if (section == "channel")
            apply_channel(config, ctx, value);
        else if (section == "pipeline")
            apply_pipeline(config, ctx, value);
        else if (section == "estimator")
            apply_estimator(config, ctx, value);
        else if (section == "sweep")
            apply_sweep(config, ctx, value);
        else
            apply_io(config, ctx, value);
    }

    // The campaign seed drives the estimator's derived jitter streams.
    config.estimator.seed = config.channel.seed;
    config.validate();
    return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_run_config(buffer.str(), path.string());
}

std::vector<double> sweep_distances(const SweepPlanConfig& plan) {
    std::vector<double> distances;
    const double span = plan.distance_max - plan.distance_min;
    const std::size_t count = static_cast<std::size_t>(std::floor(span / plan.step + 1e-9)) + 1;
    distances.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        distances.push_back(plan.distance_min + static_cast<double>(i) * plan.step);
    return distances;
}

}  // namespace keyrate
