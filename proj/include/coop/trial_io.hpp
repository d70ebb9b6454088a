#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "coop/evaluation.hpp"
#include "coop/kalman.hpp"
#include "coop/records.hpp"

// File-format layer. Trial time series are CSV (`t,c_p,c_v,y`, one row per
// tick, LF endings, full-precision decimal floats) with a JSON sidecar
// (same basename, `.meta.json`) carrying the header, the generating spec, and
// the ground-truth series when present. Parameters, manifests, traces, and
// reports are JSON. All formats are documented in docs/formats.md and gated by
// format_version; writes are atomic (temp file + rename). Malformed input
// raises IoError/ValidationError, never crashes.

namespace coop {

inline constexpr int kTrialFormatVersion = 1;

// Sidecar path for a trial CSV: `<stem>.meta.json` next to it.
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

// Reads a trial (CSV + sidecar). Validates the header, the c_v domain, value
// finiteness, row shape, and time-grid uniformity (jitter <= 1e-6 s).
TrialRecord read_trial(const std::filesystem::path& csv_path);

// Writes a trial (CSV + sidecar). Refuses to overwrite unless `overwrite`.
void write_trial(const TrialRecord& record,
                 const std::filesystem::path& csv_path, bool overwrite = false);

// Model parameter files: a JSON object with one key per ModelParams field.
// Unknown keys are rejected; missing keys fall back to the documented
// defaults (reported through `defaulted_keys` when given).
ModelParams read_params(const std::filesystem::path& path,
                        std::vector<std::string>* defaulted_keys = nullptr);
void write_params(const ModelParams& params,
                  const std::filesystem::path& path);

// Suite manifest: the seed and grid that produced a directory of trials plus
// one entry per trial file (paths relative to the manifest).
struct ManifestEntry {
  std::string file;
  std::string subject_id;
  TrialSpec spec;
};

struct SuiteManifest {
  std::uint64_t master_seed = 0;
  int n_subjects = 0;
  int trials_per_subject = 0;
  BehaviorMode behavior = BehaviorMode::Model;
  ModelParams params;
  std::vector<ManifestEntry> entries;
};

void write_manifest(const SuiteManifest& manifest,
                    const std::filesystem::path& path);
SuiteManifest read_manifest(const std::filesystem::path& path);

// Filter trace as JSON (nested arrays) and a plot-ready CSV flattening with
// +/-2 sigma bands for x, eta, and xi.
void write_trace(const FilterTrace& trace, double dt,
                 const std::filesystem::path& path);
void write_plot_csv(const FilterTrace& trace, const TrialRecord& record,
                    const std::filesystem::path& path);

// Evaluation report as JSON.
void write_report(const EvaluationReport& report,
                  const std::filesystem::path& path);

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

}  // namespace coop
