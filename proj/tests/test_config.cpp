// SPDX-License-Identifier: Apache-2.0
//
// Run-configuration parser tests: defaults, every key, and the error
// messages that must name the offending file location and field.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "keyrate/config.hpp"
#include "keyrate/errors.hpp"

using namespace keyrate;

namespace {

std::string message_of(const std::string& text) {
    try {
        parse_run_config(text, "test.ini");
        return "";
    } catch (const ConfigError& e) {
        return e.what();
    }
}

}  // namespace

TEST_CASE("defaults describe the reference campaign") {
    RunConfig config = parse_run_config("");
    CHECK(config.channel.wavelength == 0.125);
    CHECK(config.channel.ab_correlation == 0.99);
    CHECK(config.channel.sampling_interval == 0.1);
    CHECK(config.pipeline.downsample_factor == 30);
    CHECK(config.pipeline.decorrelation_order == 30);
    CHECK(config.estimator.neighbor_k == 4);
    CHECK(config.sweep.samples_per_step == 300000);
    CHECK(config.sweep.ab_distance == 5.0);

    const std::vector<double> grid = sweep_distances(config.sweep);
    REQUIRE(grid.size() == 61);  // 0 to 0.30 m in 5 mm steps
    CHECK(grid.front() == 0.0);
    CHECK(grid.back() == doctest::Approx(0.30).epsilon(1e-12));
    for (std::size_t i = 1; i < grid.size(); ++i)
        CHECK(grid[i] - grid[i - 1] == doctest::Approx(0.005).epsilon(1e-9));
}

TEST_CASE("every documented key round-trips into its field") {
    const std::string text = R"(# full configuration
[channel]
wavelength_m = 0.0625
ab_correlation = 0.95
spatial_mode = empirical_table
spatial_table = 0:0.1, 0.05:0.3, 0.30:0.05
ar_coefficients = 0.5, -0.2
cyclic_mode = randomized
cyclic_period = 48
cyclic_amplitude_db = 2.5
quantization_step_db = 1.0
noise_floor_std_db = 0.25
sampling_interval_s = 0.05
seed = 777

[pipeline]
downsample_factor = 15
decorrelation_order = 20

[estimator]
neighbor_k = 6
jitter_amplitude = 1e-7

[sweep]
distance_be_range_m = 0.01, 0.20
step_size_m = 0.01
samples_per_step = 5000
distance_ab_m = 3.5

[io]
use_secondary_eve = true
)";
    RunConfig config = parse_run_config(text, "full.ini");
    CHECK(config.channel.wavelength == 0.0625);
    CHECK(config.channel.ab_correlation == 0.95);
    CHECK(config.channel.spatial_profile.mode == SpatialMode::empirical_table);
    REQUIRE(config.channel.spatial_profile.table.size() == 3);
    CHECK(config.channel.spatial_profile.table[1].first == 0.05);
    CHECK(config.channel.spatial_profile.table[1].second == 0.3);
    CHECK(config.channel.temporal.ar_coefficients == std::vector<double>{0.5, -0.2});
    CHECK(config.channel.temporal.cyclic_mode == CyclicMode::randomized);
    CHECK(config.channel.temporal.cyclic_period == 48);
    CHECK(config.channel.temporal.cyclic_amplitude == 2.5);
    CHECK(config.channel.quantization_step == 1.0);
    CHECK(config.channel.noise_floor_std == 0.25);
    CHECK(config.channel.sampling_interval == 0.05);
    CHECK(config.channel.seed == 777);
    CHECK(config.pipeline.downsample_factor == 15);
    CHECK(config.pipeline.decorrelation_order == 20);
    CHECK(config.estimator.neighbor_k == 6);
    CHECK(config.estimator.jitter_amplitude == 1e-7);
    CHECK(config.sweep.distance_min == 0.01);
    CHECK(config.sweep.distance_max == 0.20);
    CHECK(config.sweep.step == 0.01);
    CHECK(config.sweep.samples_per_step == 5000);
    CHECK(config.sweep.ab_distance == 3.5);
    CHECK(config.io.use_secondary_eve == true);

    // The campaign seed drives the derived estimator jitter streams.
    CHECK(config.estimator.seed == 777);

    const std::vector<double> grid = sweep_distances(config.sweep);
    REQUIRE(grid.size() == 20);
    CHECK(grid.front() == 0.01);
    CHECK(grid.back() == doctest::Approx(0.20).epsilon(1e-12));
}

TEST_CASE("spatial mode spellings parse") {
    CHECK(parse_run_config("[channel]\nspatial_mode = ideal_jakes\n")
              .channel.spatial_profile.mode == SpatialMode::ideal_jakes);
    CHECK(parse_run_config("[channel]\nspatial_mode = shifted_peak\npeak_distance_m = 0.08\n")
              .channel.spatial_profile.peak_distance == 0.08);
    CHECK(message_of("[channel]\nspatial_mode = cubist\n").find("ideal_jakes") !=
          std::string::npos);
}

TEST_CASE("jitter amplitude accepts auto, numbers, and nothing else") {
    CHECK(parse_run_config("[estimator]\njitter_amplitude = auto\n").estimator.jitter_amplitude <
          0.0);
    CHECK(parse_run_config("[estimator]\njitter_amplitude = 0\n").estimator.jitter_amplitude ==
          0.0);
    CHECK(message_of("[estimator]\njitter_amplitude = -1e-6\n").find(">= 0") !=
          std::string::npos);
}

TEST_CASE("boolean spellings parse") {
    for (const char* yes : {"true", "yes", "1"})
        CHECK(parse_run_config(std::string("[io]\nuse_secondary_eve = ") + yes + "\n")
                  .io.use_secondary_eve);
    for (const char* no : {"false", "no", "0"})
        CHECK_FALSE(parse_run_config(std::string("[io]\nuse_secondary_eve = ") + no + "\n")
                        .io.use_secondary_eve);
    CHECK(message_of("[io]\nuse_secondary_eve = maybe\n").find("true/false") !=
          std::string::npos);
}

TEST_CASE("errors name the file, line, section, and key") {
    SUBCASE("unknown key") {
        const std::string msg = message_of("[channel]\nwobble = 3\n");
        CHECK(msg.find("test.ini:2") != std::string::npos);
        CHECK(msg.find("[channel] wobble") != std::string::npos);
        CHECK(msg.find("unknown key") != std::string::npos);
    }
    SUBCASE("unknown section") {
        const std::string msg = message_of("[flux]\nx = 1\n");
        CHECK(msg.find("unknown section [flux]") != std::string::npos);
    }
    SUBCASE("malformed number") {
        const std::string msg = message_of("[channel]\nwavelength_m = twelve\n");
        CHECK(msg.find("[channel] wavelength_m") != std::string::npos);
        CHECK(msg.find("expected a number") != std::string::npos);
    }
    SUBCASE("key before any section") {
        const std::string msg = message_of("wavelength_m = 0.125\n");
        CHECK(msg.find("before any [section]") != std::string::npos);
    }
    SUBCASE("missing equals sign") {
        CHECK(message_of("[channel]\nwavelength_m 0.125\n").find("key = value") !=
              std::string::npos);
    }
    SUBCASE("range needs exactly two entries") {
        CHECK(message_of("[sweep]\ndistance_be_range_m = 0.0\n").find("min, max") !=
              std::string::npos);
        CHECK(message_of("[sweep]\ndistance_be_range_m = 0, 1, 2\n").find("min, max") !=
              std::string::npos);
    }
    SUBCASE("malformed table pair") {
        CHECK(message_of("[channel]\nspatial_mode = empirical_table\nspatial_table = 0.05\n")
                  .find("distance:correlation") != std::string::npos);
    }
}

TEST_CASE("validation rejects inconsistent complete configurations") {
    CHECK(message_of("[pipeline]\ndownsample_factor = 0\n").find("downsample_factor") !=
          std::string::npos);
    CHECK(message_of("[estimator]\nneighbor_k = 0\n").find("neighbor_k") != std::string::npos);
    CHECK(message_of("[sweep]\nstep_size_m = 0\n").find("step_size_m") != std::string::npos);
    CHECK(message_of("[sweep]\ndistance_be_range_m = 0.2, 0.1\n").find("min <= max") !=
          std::string::npos);
    CHECK(message_of("[sweep]\nsamples_per_step = 1\n").find("samples_per_step") !=
          std::string::npos);
    CHECK(message_of("[channel]\nab_correlation = 1.5\n") != "");
    CHECK(message_of("[channel]\nar_coefficients = 1.2\n") != "");
}

TEST_CASE("comments and blank lines are ignored") {
    const std::string text =
        "# leading comment\n\n[channel]\n; alt comment style\nseed = 5\n\n# done\n";
    CHECK(parse_run_config(text).channel.seed == 5);
}

TEST_CASE("load_run_config reads from disk and reports the path") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "keyrate_test_config";
    fs::create_directories(dir);
    {
        std::ofstream out(dir / "run.ini");
        out << "[channel]\nseed = 31\n";
    }
    CHECK(load_run_config(dir / "run.ini").channel.seed == 31);
    CHECK_THROWS_AS(load_run_config(dir / "absent.ini"), IoError);

    {
        std::ofstream out(dir / "bad.ini");
        out << "[channel]\nseed = x\n";
    }
    try {
        load_run_config(dir / "bad.ini");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("bad.ini") != std::string::npos);
    }
}
