// SPDX-License-Identifier: Apache-2.0
//
// Trace/sweep data-model and file round-trip tests.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <doctest.h>

#include "keyrate/errors.hpp"
#include "keyrate/trace.hpp"
#include "keyrate/trace_io.hpp"

using namespace keyrate;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("keyrate_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

TimeSeries random_series(std::mt19937_64& rng, std::size_t n, double interval) {
    TimeSeries s;
    s.sampling_interval = interval;
    s.values.resize(n);
    for (auto& v : s.values)
        v = (static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5) * 20.0;
    return s;
}

TraceSet random_trace(std::uint64_t seed, std::size_t n, bool with_secondary) {
    std::mt19937_64 rng(seed);
    TraceSet t;
    t.x = random_series(rng, n, 0.1);
    t.y = random_series(rng, n, 0.1);
    t.z = random_series(rng, n, 0.1);
    if (with_secondary) t.z_secondary = random_series(rng, n, 0.1);
    t.eve_distance = 0.05;
    t.ab_distance = 5.0;
    t.wavelength = 0.125;
    return t;
}

void write_file(const fs::path& p, const std::string& body) {
    std::ofstream out(p);
    out << body;
}

}  // namespace

TEST_CASE("variant names round-trip") {
    CHECK(std::string(variant_name(Variant::original)) == "original");
    CHECK(std::string(variant_name(Variant::downsampled)) == "downsampled");
    CHECK(std::string(variant_name(Variant::decorrelated)) == "decorrelated");
    for (auto v : {Variant::original, Variant::downsampled, Variant::decorrelated})
        CHECK(variant_from_name(variant_name(v)) == v);
    CHECK_FALSE(variant_from_name("squashed").has_value());
}

TEST_CASE("trace CSV save/load round-trips bit-exactly") {
    const fs::path dir = fresh_dir("roundtrip");
    for (bool with_secondary : {false, true}) {
        CAPTURE(with_secondary);
        TraceSet original = random_trace(with_secondary ? 7u : 3u, 257, with_secondary);
        const fs::path file = dir / (with_secondary ? "dual.csv" : "single.csv");
        save_trace(original, file);
        TraceSet loaded = load_trace(file);

        REQUIRE(loaded.length() == original.length());
        CHECK(loaded.z_secondary.has_value() == with_secondary);
        for (std::size_t i = 0; i < original.length(); ++i) {
            CHECK(loaded.x[i] == original.x[i]);
            CHECK(loaded.y[i] == original.y[i]);
            CHECK(loaded.z[i] == original.z[i]);
            if (with_secondary) CHECK((*loaded.z_secondary)[i] == (*original.z_secondary)[i]);
        }
        CHECK(loaded.variant == Variant::original);
        CHECK(loaded.provenance.find(file.filename().string()) != std::string::npos);
    }
}

TEST_CASE("trace loader rejects malformed files with located errors") {
    const fs::path dir = fresh_dir("malformed");

    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_trace(dir / "nope.csv"), IoError);
    }
    SUBCASE("bad header") {
        write_file(dir / "t.csv", "a,b,c\n0,1,2\n");
        CHECK_THROWS_AS(load_trace(dir / "t.csv"), ParseError);
    }
    SUBCASE("wrong arity") {
        write_file(dir / "t.csv", "k,x,y,z\n0,1.0,2.0\n");
        CHECK_THROWS_AS(load_trace(dir / "t.csv"), ParseError);
    }
    SUBCASE("non-numeric value cites the line") {
        write_file(dir / "t.csv", "k,x,y,z\n0,1.0,2.0,3.0\n1,4.0,oops,6.0\n");
        try {
            load_trace(dir / "t.csv");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find(":3") != std::string::npos);
        }
    }
    SUBCASE("index must increase by one") {
        write_file(dir / "t.csv", "k,x,y,z\n0,1.0,2.0,3.0\n2,4.0,5.0,6.0\n");
        CHECK_THROWS_AS(load_trace(dir / "t.csv"), ParseError);
    }
    SUBCASE("index must start at zero") {
        write_file(dir / "t.csv", "k,x,y,z\n1,1.0,2.0,3.0\n");
        CHECK_THROWS_AS(load_trace(dir / "t.csv"), ParseError);
    }
    SUBCASE("header-only file is empty input") {
        write_file(dir / "t.csv", "k,x,y,z\n");
        CHECK_THROWS_AS(load_trace(dir / "t.csv"), EmptyInputError);
    }
    SUBCASE("zero-byte file is empty input") {
        write_file(dir / "t.csv", "");
        CHECK_THROWS_AS(load_trace(dir / "t.csv"), EmptyInputError);
    }
}

TEST_CASE("validate_trace pinpoints structural problems") {
    TraceSet good = random_trace(11, 64, false);
    CHECK(validate_trace(good).all_passed());

    SUBCASE("non-finite sample cites component and index") {
        TraceSet t = good;
        t.y.values[7] = std::nan("");
        ValidationReport report = validate_trace(t);
        CHECK_FALSE(report.all_passed());
        const std::string text = report.to_string();
        CHECK(text.find("y") != std::string::npos);
        CHECK(text.find("7") != std::string::npos);
    }
    SUBCASE("length mismatch names the short component") {
        TraceSet t = good;
        t.z.values.pop_back();
        ValidationReport report = validate_trace(t);
        CHECK_FALSE(report.all_passed());
        CHECK(report.to_string().find("z") != std::string::npos);
    }
    SUBCASE("sampling interval mismatch fails") {
        TraceSet t = good;
        t.x.sampling_interval = 0.2;
        CHECK_FALSE(validate_trace(t).all_passed());
    }
    SUBCASE("non-positive sampling interval fails") {
        TraceSet t = good;
        t.x.sampling_interval = t.y.sampling_interval = t.z.sampling_interval = 0.0;
        CHECK_FALSE(validate_trace(t).all_passed());
    }
    SUBCASE("single-sample trace is too short to analyze") {
        TraceSet t = random_trace(5, 1, false);
        CHECK_FALSE(validate_trace(t).all_passed());
    }
    SUBCASE("negative geometry fails") {
        TraceSet t = good;
        t.eve_distance = -0.01;
        CHECK_FALSE(validate_trace(t).all_passed());
    }
}

TEST_CASE("validate_sweep enforces campaign-level invariants") {
    SweepDataset sweep;
    for (int i = 0; i < 4; ++i) {
        TraceSet t = random_trace(100 + i, 64, false);
        t.eve_distance = 0.005 * i;
        sweep.positions.push_back(std::move(t));
    }
    sweep.step_size = 0.005;
    sweep.samples_per_step = 64;
    CHECK(validate_sweep(sweep).all_passed());

    SUBCASE("empty campaign fails") {
        SweepDataset empty;
        CHECK_FALSE(validate_sweep(empty).all_passed());
    }
    SUBCASE("non-increasing distance names the position") {
        SweepDataset bad = sweep;
        bad.positions[2].eve_distance = bad.positions[1].eve_distance;
        ValidationReport report = validate_sweep(bad);
        CHECK_FALSE(report.all_passed());
        CHECK(report.to_string().find("2") != std::string::npos);
    }
    SUBCASE("mixed variants fail") {
        SweepDataset bad = sweep;
        bad.positions[3].variant = Variant::downsampled;
        CHECK_FALSE(validate_sweep(bad).all_passed());
    }
    SUBCASE("mixed lengths fail") {
        SweepDataset bad = sweep;
        bad.positions[1].x.values.pop_back();
        bad.positions[1].y.values.pop_back();
        bad.positions[1].z.values.pop_back();
        CHECK_FALSE(validate_sweep(bad).all_passed());
    }
    SUBCASE("per-position trace faults carry the position prefix") {
        SweepDataset bad = sweep;
        bad.positions[3].z.values[5] = std::nan("");
        ValidationReport report = validate_sweep(bad);
        CHECK_FALSE(report.all_passed());
        CHECK(report.to_string().find("position 3") != std::string::npos);
    }
}

TEST_CASE("meta sidecar round-trips and tolerates comments/unknown keys") {
    const fs::path dir = fresh_dir("meta");
    SweepMeta meta;
    meta.wavelength_m = 0.0625;
    meta.ab_distance_m = 4.5;
    meta.sampling_interval_s = 0.05;
    meta.samples_per_step = 12345;
    meta.step_size_m = 0.0025;
    save_meta(meta, dir / "meta.toml");
    SweepMeta loaded = load_meta(dir / "meta.toml");
    CHECK(loaded.wavelength_m == meta.wavelength_m);
    CHECK(loaded.ab_distance_m == meta.ab_distance_m);
    CHECK(loaded.sampling_interval_s == meta.sampling_interval_s);
    CHECK(loaded.samples_per_step == meta.samples_per_step);
    CHECK(loaded.step_size_m == meta.step_size_m);

    write_file(dir / "loose.toml",
               "# campaign notes\nwavelength_m = 0.125\nfuture_key = whatever\n");
    SweepMeta loose = load_meta(dir / "loose.toml");
    CHECK(loose.wavelength_m == 0.125);

    write_file(dir / "bad.toml", "wavelength_m = not_a_number\n");
    CHECK_THROWS_AS(load_meta(dir / "bad.toml"), ParseError);
}

TEST_CASE("sweep directory save/load restores order and metadata") {
    const fs::path dir = fresh_dir("sweep_io");
    SweepDataset sweep;
    for (int i = 0; i < 5; ++i) {
        TraceSet t = random_trace(200 + i, 32, i == 0 ? false : false);
        t.eve_distance = 0.005 * i;
        sweep.positions.push_back(std::move(t));
    }
    sweep.step_size = 0.005;
    sweep.samples_per_step = 32;
    save_sweep(sweep, dir / "campaign");

    CHECK(fs::exists(dir / "campaign" / "pos_0000.csv"));
    CHECK(fs::exists(dir / "campaign" / "pos_0020.csv"));
    CHECK(fs::exists(dir / "campaign" / "meta.toml"));

    SweepDataset loaded = load_sweep(dir / "campaign");
    REQUIRE(loaded.size() == sweep.size());
    CHECK(loaded.step_size == doctest::Approx(0.005).epsilon(1e-12));
    CHECK(loaded.samples_per_step == 32);
    for (std::size_t i = 0; i < sweep.size(); ++i) {
        CHECK(loaded.positions[i].eve_distance ==
              doctest::Approx(sweep.positions[i].eve_distance).epsilon(1e-12));
        for (std::size_t k = 0; k < 32; ++k)
            CHECK(loaded.positions[i].x[k] == sweep.positions[i].x[k]);
    }
}

TEST_CASE("sweep loader sorts by distance and rejects duplicates") {
    const fs::path dir = fresh_dir("sweep_sort");

    // Write positions in deliberately shuffled creation order.
    for (int mm : {150, 0, 75}) {
        TraceSet t = random_trace(300 + mm, 16, false);
        t.eve_distance = mm / 1000.0;
        char name[32];
        std::snprintf(name, sizeof(name), "pos_%04d.csv", mm);
        save_trace(t, dir / name);
    }
    SweepDataset loaded = load_sweep(dir);
    REQUIRE(loaded.size() == 3);
    CHECK(loaded.positions[0].eve_distance == doctest::Approx(0.000));
    CHECK(loaded.positions[1].eve_distance == doctest::Approx(0.075));
    CHECK(loaded.positions[2].eve_distance == doctest::Approx(0.150));

    SUBCASE("duplicate distances under different zero padding are rejected") {
        TraceSet t = random_trace(999, 16, false);
        t.eve_distance = 0.075;
        save_trace(t, dir / "pos_75.csv");  // same 75 mm as pos_0075.csv
        CHECK_THROWS_AS(load_sweep(dir), ParseError);
    }
    SUBCASE("directory without position files is empty input") {
        const fs::path empty = fresh_dir("sweep_empty");
        write_file(empty / "notes.txt", "nothing here\n");
        CHECK_THROWS_AS(load_sweep(empty), EmptyInputError);
    }
}

TEST_CASE("secondary eavesdropper channel can be promoted") {
    TraceSet dual = random_trace(42, 48, true);
    const std::vector<double> primary = dual.z.values;
    const std::vector<double> secondary = dual.z_secondary->values;
    use_secondary_eve(dual);
    CHECK(dual.z.values == secondary);
    CHECK(dual.z_secondary->values == primary);

    TraceSet single = random_trace(43, 48, false);
    CHECK_THROWS_AS(use_secondary_eve(single), DomainError);
}

