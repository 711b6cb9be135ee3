#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "test_util.hpp"
#include "vitalsig/dataio.hpp"
#include "vitalsig/errors.hpp"
#include "vitalsig/rng.hpp"
#include "vitalsig/synth.hpp"

using namespace vitalsig;
using testutil::error_code_of;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "vitalsig_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("rgb: 2 patches x 3 frames parse with duration 0.1 s") {
    const auto path = temp_file("rgb_small.csv");
    write_file(path,
               "# fps=30\n"
               "frame_index,patch_id,r_mean,g_mean,b_mean\n"
               "0,1,0.5,0.6,0.4\n0,2,0.51,0.61,0.41\n"
               "1,1,0.5,0.6,0.4\n1,2,0.51,0.61,0.41\n"
               "2,1,0.5,0.6,0.4\n2,2,0.51,0.61,0.41\n");
    const RgbPatchTraceSet set = load_rgb_traces(path);
    CHECK(set.patches.size() == 2);
    CHECK(set.n_samples() == 3);
    CHECK(set.duration_s() == doctest::Approx(0.1));
    CHECK(set.patches[0].patch_id == 1);
    CHECK(set.patches[1].patch_id == 2);
}

TEST_CASE("rgb: 0..255 inputs normalize to [0,1]") {
    const auto path = temp_file("rgb_255.csv");
    write_file(path,
               "# fps=30\n"
               "frame_index,patch_id,r_mean,g_mean,b_mean\n"
               "0,1,127.5,255,51\n1,1,127.5,255,51\n");
    const RgbPatchTraceSet set = load_rgb_traces(path);
    CHECK(set.patches[0].samples[0][0] == doctest::Approx(0.5));
    CHECK(set.patches[0].samples[0][1] == doctest::Approx(1.0));
    CHECK(set.patches[0].samples[0][2] == doctest::Approx(0.2));
}

TEST_CASE("rgb: inconsistent patch lengths rejected") {
    const auto path = temp_file("rgb_bad.csv");
    write_file(path,
               "# fps=30\n"
               "frame_index,patch_id,r_mean,g_mean,b_mean\n"
               "0,5,0.5,0.6,0.4\n1,5,0.5,0.6,0.4\n"
               "0,6,0.5,0.6,0.4\n1,6,0.5,0.6,0.4\n2,6,0.5,0.6,0.4\n");
    CHECK(error_code_of([&] { load_rgb_traces(path); }) == ErrorCode::InconsistentPatchLength);
}

TEST_CASE("rgb: malformed rows and bad fps") {
    const auto path = temp_file("rgb_malformed.csv");
    write_file(path, "# fps=30\n0,1,0.5,abc,0.4\n");
    CHECK(error_code_of([&] { load_rgb_traces(path); }) == ErrorCode::MalformedRow);

    write_file(path, "# fps=30\n0,1,0.5,0.4\n");
    CHECK(error_code_of([&] { load_rgb_traces(path); }) == ErrorCode::MalformedRow);

    write_file(path, "# fps=0\n0,1,0.5,0.6,0.4\n");
    CHECK(error_code_of([&] { load_rgb_traces(path); }) == ErrorCode::NonPositiveFps);

    write_file(path, "# fps=30\n0,1,0.5,0.6,0.4\n0,1,0.5,0.6,0.4\n");
    CHECK(error_code_of([&] { load_rgb_traces(path); }) == ErrorCode::DuplicatePatch);

    CHECK(error_code_of([&] { load_rgb_traces(temp_file("missing.csv")); }) == ErrorCode::FileNotFound);
}

TEST_CASE("rgb: row order does not matter") {
    const std::string header = "# fps=25\nframe_index,patch_id,r_mean,g_mean,b_mean\n";
    std::vector<std::string> rows;
    for (int f = 0; f < 10; ++f) {
        for (int p : {3, 7, 9}) {
            std::ostringstream row;
            row << f << ',' << p << ",0." << (f + 1) << ",0." << (p + 10 * f + 1) << ",0.3\n";
            rows.push_back(row.str());
        }
    }
    const auto sorted_path = temp_file("rgb_sorted.csv");
    std::string text = header;
    for (const auto& r : rows) text += r;
    write_file(sorted_path, text);

    std::mt19937 shuffle_rng(17);
    std::shuffle(rows.begin(), rows.end(), shuffle_rng);
    const auto shuffled_path = temp_file("rgb_shuffled.csv");
    text = header;
    for (const auto& r : rows) text += r;
    write_file(shuffled_path, text);

    const RgbPatchTraceSet a = load_rgb_traces(sorted_path);
    const RgbPatchTraceSet b = load_rgb_traces(shuffled_path);
    REQUIRE(a.patches.size() == b.patches.size());
    for (std::size_t p = 0; p < a.patches.size(); ++p) {
        CHECK(a.patches[p].patch_id == b.patches[p].patch_id);
        CHECK(a.patches[p].samples == b.patches[p].samples);
    }
}

TEST_CASE("rgb: synthgen round-trip is canonical and tight") {
    synth::SynthSpec spec;
    spec.seed = 42;
    spec.duration_s = 300.0;
    spec.fps = 30.0;
    spec.noise_sigma = 0.002;
    spec.n_patches = 2;
    const synth::RppgSynth gen = synth::synth_rppg(spec);

    const auto path = temp_file("rgb_roundtrip.csv");
    save_rgb_traces(gen.traces, path);
    const RgbPatchTraceSet loaded = load_rgb_traces(path);
    REQUIRE(loaded.patches.size() == gen.traces.patches.size());
    REQUIRE(loaded.n_samples() == gen.traces.n_samples());
    for (std::size_t p = 0; p < loaded.patches.size(); ++p) {
        for (std::size_t i = 0; i < loaded.n_samples(); ++i) {
            for (int c = 0; c < 3; ++c) {
                CHECK(std::abs(loaded.patches[p].samples[i][c] - gen.traces.patches[p].samples[i][c]) <=
                      1e-9);
            }
        }
    }

    // canonical files survive a write-load-write cycle byte for byte
    const auto path2 = temp_file("rgb_roundtrip2.csv");
    save_rgb_traces(loaded, path2);
    CHECK(read_file(path) == read_file(path2));
}

TEST_CASE("thermal: 22 rois x 100 frames") {
    std::ostringstream text;
    text << "# fps=10\nframe_index,roi_id,temp_c\n";
    for (int f = 0; f < 100; ++f) {
        for (int roi : kCanonicalThermalRois) text << f << ',' << roi << ",34.5\n";
    }
    const auto path = temp_file("thermal_22.csv");
    write_file(path, text.str());
    const ThermalTraceSet set = load_thermal_traces(path);
    CHECK(set.rois.size() == 22);
    CHECK(set.n_samples() == 100);
}

TEST_CASE("thermal: duplicate roi row rejected") {
    const auto path = temp_file("thermal_dup.csv");
    write_file(path, "# fps=10\n0,18,34.0\n0,18,34.1\n");
    CHECK(error_code_of([&] { load_thermal_traces(path); }) == ErrorCode::DuplicateRoi);
}

TEST_CASE("thermal: synthgen round-trip exact to 1e-9") {
    synth::ThermalSynthSpec spec;
    spec.seed = 5;
    spec.fps = 8.0;
    spec.duration_s = 250.0;
    spec.noise_sigma = 0.01;
    for (int roi : {18, 30, 58}) {
        spec.baselines_c[roi] = 33.0 + roi * 0.01;
        spec.step_delta_c[roi] = roi == 30 ? -0.4 : 0.2;
    }
    const ThermalTraceSet gen = synth::synth_thermal(spec);
    const auto path = temp_file("thermal_roundtrip.csv");
    save_thermal_traces(gen, path);
    const ThermalTraceSet loaded = load_thermal_traces(path);
    REQUIRE(loaded.rois.size() == gen.rois.size());
    for (std::size_t r = 0; r < loaded.rois.size(); ++r) {
        CHECK(loaded.rois[r].roi_id == gen.rois[r].roi_id);
        for (std::size_t i = 0; i < loaded.n_samples(); ++i) {
            CHECK(std::abs(loaded.rois[r].samples_c[i] - gen.rois[r].samples_c[i]) <= 1e-9);
        }
    }
}

TEST_CASE("thermal and ecg writers are canonical") {
    synth::ThermalSynthSpec spec;
    spec.seed = 12;
    spec.fps = 4.0;
    spec.duration_s = 240.0;
    spec.noise_sigma = 0.02;
    spec.baselines_c = {{18, 33.2}, {58, 33.9}};
    const auto t1 = temp_file("thermal_canon1.csv");
    const auto t2 = temp_file("thermal_canon2.csv");
    save_thermal_traces(synth::synth_thermal(spec), t1);
    save_thermal_traces(load_thermal_traces(t1), t2);
    CHECK(read_file(t1) == read_file(t2));

    const synth::EcgSynth ecg = synth::synth_ecg(std::vector<double>(20, 750.0), 200.0);
    const auto e1 = temp_file("ecg_canon1.csv");
    const auto e2 = temp_file("ecg_canon2.csv");
    save_ecg(ecg.trace, e1);
    save_ecg(load_ecg(e1), e2);
    CHECK(read_file(e1) == read_file(e2));
}

TEST_CASE("ecg: fs inferred from 4 ms steps") {
    std::ostringstream text;
    text << "time_s,value\n";
    for (int i = 0; i < 1000; ++i) text << format_double(i * 0.004) << ",0.1\n";
    const auto path = temp_file("ecg_250.csv");
    write_file(path, text.str());
    const EcgTrace trace = load_ecg(path);
    CHECK(trace.fs == doctest::Approx(250.0).epsilon(1e-9));
    CHECK(trace.samples.size() == 1000);
}

TEST_CASE("ecg: error paths") {
    const auto path = temp_file("ecg_bad.csv");
    write_file(path, "time_s,value\n0.000,0.1\n0.004,0.2\n0.004,0.3\n0.008,0.1\n");
    CHECK(error_code_of([&] { load_ecg(path); }) == ErrorCode::NonMonotoneTime);

    write_file(path, "time_s,value\n0.000,0.1\n0.004,0.2\n0.010,0.3\n0.014,0.1\n");
    CHECK(error_code_of([&] { load_ecg(path); }) == ErrorCode::IrregularSampling);

    write_file(path, "time_s,value\n0.000,0.1\n");
    CHECK(error_code_of([&] { load_ecg(path); }) == ErrorCode::EmptyTrace);
}

TEST_CASE("ecg: synthgen round-trip recovers fs") {
    const std::vector<double> rr(40, 800.0);
    const synth::EcgSynth gen = synth::synth_ecg(rr, 250.0);
    const auto path = temp_file("ecg_roundtrip.csv");
    save_ecg(gen.trace, path);
    const EcgTrace loaded = load_ecg(path);
    CHECK(std::abs(loaded.fs - 250.0) <= 1e-6);
    REQUIRE(loaded.samples.size() == gen.trace.samples.size());
    for (std::size_t i = 0; i < loaded.samples.size(); ++i) {
        CHECK(std::abs(loaded.samples[i] - gen.trace.samples[i]) <= 1e-9);
    }
}

TEST_CASE("manifest round-trip and validation") {
    const auto dir = std::filesystem::temp_directory_path() / "vitalsig_tests" / "manifest";
    std::filesystem::create_directories(dir);
    write_file(dir / "rgb.csv", "# fps=30\n0,1,0.5,0.6,0.4\n");
    write_file(dir / "thermal.csv", "# fps=10\n0,18,34.0\n");

    SessionManifest m;
    m.session_id = "s01";
    m.condition_label = ConditionLabel::stimulated;
    m.rgb_path = "rgb.csv";
    m.thermal_path = "thermal.csv";
    save_manifest(m, dir / "manifest.json");

    const SessionManifest loaded = load_manifest(dir / "manifest.json");
    CHECK(loaded.session_id == "s01");
    CHECK(loaded.condition_label == ConditionLabel::stimulated);
    CHECK(!loaded.ecg_path.has_value());
    CHECK(std::filesystem::path(loaded.rgb_path).is_absolute());

    write_file(dir / "manifest.json",
               R"({"session_id":"x","condition_label":"excited","rgb_path":"rgb.csv","thermal_path":"thermal.csv"})");
    CHECK(error_code_of([&] { load_manifest(dir / "manifest.json"); }) == ErrorCode::BadLabel);

    write_file(dir / "manifest.json", R"({"session_id":"x"})");
    CHECK(error_code_of([&] { load_manifest(dir / "manifest.json"); }) == ErrorCode::MalformedManifest);

    write_file(dir / "manifest.json",
               R"({"session_id":"x","condition_label":"baseline","rgb_path":"nope.csv","thermal_path":"thermal.csv"})");
    CHECK(error_code_of([&] { load_manifest(dir / "manifest.json"); }) == ErrorCode::FileNotFound);
}
