#include "vitalsig/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "vitalsig/errors.hpp"

namespace vitalsig {

namespace {

std::string strip(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(strip(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(strip(cur));
    return fields;
}

bool parse_number(const std::string& s, double& out) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool parse_int(const std::string& s, std::int64_t& out) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw Error(ErrorCode::FileNotFound, path.string());
    }
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    return in;
}

double parse_fps_header(const std::string& line, const std::filesystem::path& path) {
    const std::string stripped = strip(line);
    const std::string prefix = "# fps=";
    if (stripped.rfind(prefix, 0) != 0) {
        throw Error(ErrorCode::MalformedRow, "missing '# fps=' header in " + path.string());
    }
    double fps = 0.0;
    if (!parse_number(stripped.substr(prefix.size()), fps)) {
        throw Error(ErrorCode::MalformedRow, "bad fps header in " + path.string());
    }
    if (fps <= 0.0) throw Error(ErrorCode::NonPositiveFps, "fps must be > 0, got " + stripped);
    return fps;
}

bool is_column_header(const std::vector<std::string>& fields) {
    double tmp;
    return !fields.empty() && !parse_number(fields.front(), tmp);
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

const char* condition_label_name(ConditionLabel label) {
    return label == ConditionLabel::baseline ? "baseline" : "stimulated";
}

ConditionLabel parse_condition_label(const std::string& text) {
    if (text == "baseline") return ConditionLabel::baseline;
    if (text == "stimulated") return ConditionLabel::stimulated;
    throw Error(ErrorCode::BadLabel, "condition_label must be baseline or stimulated, got '" + text + "'");
}

std::vector<int> canonical_roi_order(std::vector<int> roi_ids) {
    auto table_pos = [](int id) {
        for (std::size_t i = 0; i < kCanonicalThermalRois.size(); ++i) {
            if (kCanonicalThermalRois[i] == id) return static_cast<int>(i);
        }
        return static_cast<int>(kCanonicalThermalRois.size());
    };
    std::sort(roi_ids.begin(), roi_ids.end(), [&](int a, int b) {
        const int pa = table_pos(a), pb = table_pos(b);
        return pa != pb ? pa < pb : a < b;
    });
    return roi_ids;
}

RgbPatchTraceSet load_rgb_traces(const std::filesystem::path& path) {
    std::ifstream in = open_or_throw(path);
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::EmptyTrace, path.string());
    RgbPatchTraceSet set;
    set.fps = parse_fps_header(line, path);

    struct Row {
        std::int64_t frame;
        std::int64_t patch;
        double r, g, b;
    };
    std::vector<Row> rows;
    bool first_data_line = true;
    while (std::getline(in, line)) {
        if (strip(line).empty()) continue;
        const std::vector<std::string> f = split_csv(line);
        if (first_data_line && is_column_header(f)) {
            first_data_line = false;
            continue;
        }
        first_data_line = false;
        Row row{};
        if (f.size() != 5 || !parse_int(f[0], row.frame) || !parse_int(f[1], row.patch) ||
            !parse_number(f[2], row.r) || !parse_number(f[3], row.g) || !parse_number(f[4], row.b)) {
            throw Error(ErrorCode::MalformedRow, "bad RGB row '" + line + "'");
        }
        if (row.frame < 0) throw Error(ErrorCode::MalformedRow, "negative frame index");
        rows.push_back(row);
    }
    if (rows.empty()) throw Error(ErrorCode::EmptyTrace, path.string());

    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return std::tie(a.frame, a.patch) < std::tie(b.frame, b.patch);
    });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].frame == rows[i - 1].frame && rows[i].patch == rows[i - 1].patch) {
            throw Error(ErrorCode::DuplicatePatch,
                        "patch " + std::to_string(rows[i].patch) + " repeated at frame " +
                            std::to_string(rows[i].frame));
        }
    }

    std::map<std::int64_t, std::vector<std::array<double, 3>>> by_patch;
    double max_value = 0.0;
    for (const Row& row : rows) {
        by_patch[row.patch].push_back({row.r, row.g, row.b});
        max_value = std::max({max_value, row.r, row.g, row.b});
    }
    const std::size_t count = by_patch.begin()->second.size();
    for (const auto& [id, samples] : by_patch) {
        if (samples.size() != count) {
            throw Error(ErrorCode::InconsistentPatchLength,
                        "patch " + std::to_string(id) + " has " + std::to_string(samples.size()) +
                            " samples, expected " + std::to_string(count));
        }
    }
    // values above 1.5 are taken as a 0..255 scale and normalized
    const double scale = max_value > 1.5 ? 1.0 / 255.0 : 1.0;
    for (auto& [id, samples] : by_patch) {
        PatchTrace patch;
        patch.patch_id = static_cast<int>(id);
        patch.samples = std::move(samples);
        if (scale != 1.0) {
            for (auto& s : patch.samples)
                for (double& v : s) v *= scale;
        }
        set.patches.push_back(std::move(patch));
    }
    return set;
}

void save_rgb_traces(const RgbPatchTraceSet& traces, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << "# fps=" << format_double(traces.fps) << "\n";
    out << "frame_index,patch_id,r_mean,g_mean,b_mean\n";
    const std::size_t n = traces.n_samples();
    for (std::size_t frame = 0; frame < n; ++frame) {
        for (const PatchTrace& patch : traces.patches) {
            const auto& s = patch.samples[frame];
            out << frame << ',' << patch.patch_id << ',' << format_double(s[0]) << ','
                << format_double(s[1]) << ',' << format_double(s[2]) << "\n";
        }
    }
}

ThermalTraceSet load_thermal_traces(const std::filesystem::path& path) {
    std::ifstream in = open_or_throw(path);
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::EmptyTrace, path.string());
    ThermalTraceSet set;
    set.fps = parse_fps_header(line, path);

    struct Row {
        std::int64_t frame;
        std::int64_t roi;
        double temp;
    };
    std::vector<Row> rows;
    bool first_data_line = true;
    while (std::getline(in, line)) {
        if (strip(line).empty()) continue;
        const std::vector<std::string> f = split_csv(line);
        if (first_data_line && is_column_header(f)) {
            first_data_line = false;
            continue;
        }
        first_data_line = false;
        Row row{};
        if (f.size() != 3 || !parse_int(f[0], row.frame) || !parse_int(f[1], row.roi) ||
            !parse_number(f[2], row.temp)) {
            throw Error(ErrorCode::MalformedRow, "bad thermal row '" + line + "'");
        }
        if (row.frame < 0) throw Error(ErrorCode::MalformedRow, "negative frame index");
        rows.push_back(row);
    }
    if (rows.empty()) throw Error(ErrorCode::EmptyTrace, path.string());

    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return std::tie(a.frame, a.roi) < std::tie(b.frame, b.roi);
    });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].frame == rows[i - 1].frame && rows[i].roi == rows[i - 1].roi) {
            throw Error(ErrorCode::DuplicateRoi, "roi " + std::to_string(rows[i].roi) +
                                                     " repeated at frame " + std::to_string(rows[i].frame));
        }
    }

    std::int64_t max_frame = 0;
    std::map<std::int64_t, bool> roi_ids;
    for (const Row& row : rows) {
        max_frame = std::max(max_frame, row.frame);
        roi_ids[row.roi] = true;
    }
    const std::size_t n_frames = static_cast<std::size_t>(max_frame) + 1;
    std::map<std::int64_t, std::vector<double>> grid;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& [roi, _] : roi_ids) grid[roi].assign(n_frames, nan);
    for (const Row& row : rows) grid[row.roi][static_cast<std::size_t>(row.frame)] = row.temp;

    for (auto& [roi, samples] : grid) {
        RoiTrace trace;
        trace.roi_id = static_cast<int>(roi);
        trace.samples_c = std::move(samples);
        set.rois.push_back(std::move(trace));
    }
    return set;
}

void save_thermal_traces(const ThermalTraceSet& traces, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << "# fps=" << format_double(traces.fps) << "\n";
    out << "frame_index,roi_id,temp_c\n";
    const std::size_t n = traces.n_samples();
    for (std::size_t frame = 0; frame < n; ++frame) {
        for (const RoiTrace& roi : traces.rois) {
            const double v = roi.samples_c[frame];
            if (std::isnan(v)) continue;  // dropped frame: keep the gap
            out << frame << ',' << roi.roi_id << ',' << format_double(v) << "\n";
        }
    }
}

EcgTrace load_ecg(const std::filesystem::path& path) {
    std::ifstream in = open_or_throw(path);
    std::string line;
    std::vector<double> times;
    std::vector<double> values;
    bool first_data_line = true;
    while (std::getline(in, line)) {
        if (strip(line).empty()) continue;
        const std::vector<std::string> f = split_csv(line);
        if (first_data_line && is_column_header(f)) {
            first_data_line = false;
            continue;
        }
        first_data_line = false;
        double t = 0.0, v = 0.0;
        if (f.size() != 2 || !parse_number(f[0], t) || !parse_number(f[1], v)) {
            throw Error(ErrorCode::MalformedRow, "bad ECG row '" + line + "'");
        }
        times.push_back(t);
        values.push_back(v);
    }
    if (times.size() < 2) throw Error(ErrorCode::EmptyTrace, path.string());

    std::vector<double> steps(times.size() - 1);
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        steps[i] = times[i + 1] - times[i];
        if (steps[i] <= 0.0) {
            throw Error(ErrorCode::NonMonotoneTime, "time does not increase at row " + std::to_string(i + 1));
        }
    }
    std::vector<double> sorted = steps;
    std::sort(sorted.begin(), sorted.end());
    const double med = sorted[sorted.size() / 2];
    for (double dt : steps) {
        if (std::abs(dt - med) > 0.01 * med) {
            throw Error(ErrorCode::IrregularSampling, "time step varies more than 1%");
        }
    }
    EcgTrace trace;
    // snap to a 1e-6 Hz grid so reloading a written file reproduces fs exactly
    trace.fs = std::round(1e6 / med) / 1e6;
    trace.samples = std::move(values);
    return trace;
}

void save_ecg(const EcgTrace& trace, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << "time_s,value\n";
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        out << format_double(static_cast<double>(i) / trace.fs) << ',' << format_double(trace.samples[i])
            << "\n";
    }
}

SessionManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in = open_or_throw(path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedManifest, path.string() + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("session_id") || !doc.contains("condition_label") ||
        !doc.contains("rgb_path") || !doc.contains("thermal_path")) {
        throw Error(ErrorCode::MalformedManifest, path.string() + ": missing required field");
    }
    SessionManifest m;
    try {
        m.session_id = doc.at("session_id").get<std::string>();
        m.condition_label = parse_condition_label(doc.at("condition_label").get<std::string>());
        m.rgb_path = doc.at("rgb_path").get<std::string>();
        m.thermal_path = doc.at("thermal_path").get<std::string>();
        if (doc.contains("ecg_path") && !doc.at("ecg_path").is_null()) {
            m.ecg_path = doc.at("ecg_path").get<std::string>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedManifest, path.string() + ": " + e.what());
    }

    const std::filesystem::path base = path.parent_path();
    auto resolve = [&](const std::string& p) {
        std::filesystem::path fp(p);
        if (fp.is_relative()) fp = base / fp;
        if (!std::filesystem::exists(fp)) throw Error(ErrorCode::FileNotFound, fp.string());
        return fp.string();
    };
    m.rgb_path = resolve(m.rgb_path);
    m.thermal_path = resolve(m.thermal_path);
    if (m.ecg_path) m.ecg_path = resolve(*m.ecg_path);
    return m;
}

void save_manifest(const SessionManifest& manifest, const std::filesystem::path& path) {
    nlohmann::ordered_json doc;
    doc["session_id"] = manifest.session_id;
    doc["condition_label"] = condition_label_name(manifest.condition_label);
    doc["rgb_path"] = manifest.rgb_path;
    doc["thermal_path"] = manifest.thermal_path;
    doc["ecg_path"] = manifest.ecg_path ? nlohmann::ordered_json(*manifest.ecg_path)
                                        : nlohmann::ordered_json(nullptr);
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << doc.dump(2) << "\n";
}

}  // namespace vitalsig
