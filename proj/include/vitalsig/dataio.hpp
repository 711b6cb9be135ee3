#pragma once

#include <filesystem>
#include <string>

#include "vitalsig/traces.hpp"

namespace vitalsig {

// Trace interchange formats. All files are CSV:
//   RGB:     "# fps=<float>" header, then frame_index,patch_id,r_mean,g_mean,b_mean
//   thermal: "# fps=<float>" header, then frame_index,roi_id,temp_c
//   ECG:     time_s,value rows (column header optional), sampling rate
//            inferred from the median time step
// Loading normalizes row order, so a shuffled file parses to the same
// structure; save(load(x)) is byte-identical for canonically written files.

RgbPatchTraceSet load_rgb_traces(const std::filesystem::path& path);
void save_rgb_traces(const RgbPatchTraceSet& traces, const std::filesystem::path& path);

ThermalTraceSet load_thermal_traces(const std::filesystem::path& path);
void save_thermal_traces(const ThermalTraceSet& traces, const std::filesystem::path& path);

EcgTrace load_ecg(const std::filesystem::path& path);
void save_ecg(const EcgTrace& trace, const std::filesystem::path& path);

/// Manifest JSON: {session_id, condition_label, rgb_path, thermal_path,
/// ecg_path|null}. Relative paths are resolved against the manifest's
/// directory; referenced files must exist.
SessionManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const SessionManifest& manifest, const std::filesystem::path& path);

/// Shortest round-trip decimal representation (used by every writer so
/// outputs are reproducible byte for byte).
std::string format_double(double value);

}  // namespace vitalsig
