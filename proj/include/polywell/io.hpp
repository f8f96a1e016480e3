#pragma once

#include <string>
#include <vector>

#include "polywell/core.hpp"
#include "polywell/diagnostics.hpp"
#include "polywell/presets.hpp"

namespace polywell {

// Shape names used by flags, config files, and reports.
std::string packet_shape_name(PacketShape shape);
PacketShape parse_packet_shape(const std::string& name);
std::string well_shape_name(WellShape shape);
WellShape parse_well_shape(const std::string& name);

// Round-trip-safe decimal rendering of a double (%.17g).
std::string format_double(double v);

// Snapshot schema: header "x,re,im,abs2", one row per node, LF endings,
// round-trip-safe doubles.
void write_wavefunction_csv(const std::string& path, const WaveFunction& psi);

// Reads the schema above back; the nodes must be uniformly spaced. The
// abs2 column is redundant and ignored. The result carries time = 0.
WaveFunction read_wavefunction_csv(const std::string& path);

void write_peaks_csv(const std::string& path, const std::vector<Peak>& peaks);

// Flat key = value rendering of a config, one pair per line, mirroring the
// CLI flag names. parse_config(serialize_config(c)) reproduces c exactly.
// Keys absent from the text keep their value from `base`, so a file can be
// layered over a preset.
std::string serialize_config(const RunConfig& config);
RunConfig parse_config(const std::string& text, const RunConfig& base = RunConfig{});
RunConfig load_config(const std::string& path, const RunConfig& base = RunConfig{});

// Provenance of a finished propagation, echoed into the report.
struct RunSummary {
    long long steps = 0;
    double final_time = 0.0;
    double final_norm = 0.0;
    bool norm_valid = true;
    double first_contamination_time = -1.0;   // < 0: never contaminated
    bool aborted_on_contamination = false;
};

// Deterministic JSON rendering of a report (insertion-ordered keys, two-space
// indent, LF). Pass the config to embed its echo, or nullptr to omit; same
// for the run summary.
std::string report_to_json(const DiagnosticsReport& report, const RunConfig* config,
                           const RunSummary* run = nullptr);
void write_report_json(const std::string& path, const DiagnosticsReport& report,
                       const RunConfig* config, const RunSummary* run = nullptr);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace polywell
