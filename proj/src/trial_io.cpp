#include "coop/trial_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "coop/errors.hpp"

namespace coop {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double parse_double(std::string_view token, const std::string& context) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw IoError(context + ": cannot parse number '" + std::string(token) +
                  "'");
  }
  return value;
}

// All-or-nothing text write: temp file in the target directory, then rename.
void atomic_write_text(const fs::path& path, const std::string& content) {
  const fs::path dir = path.parent_path().empty() ? fs::path(".")
                                                  : path.parent_path();
  std::error_code ec;
  fs::create_directories(dir, ec);

  static std::mt19937_64 tmp_rng(std::random_device{}());
  fs::path tmp;
  {
    std::uint64_t tag;
#ifdef _OPENMP
#pragma omp critical(coop_tmp_rng)
#endif
    tag = tmp_rng();
    tmp = path;
    tmp += ".tmp-" + std::to_string(tag);
  }

  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot open '" + tmp.string() + "' for writing");
    }
    out << content;
    out.flush();
    if (!out) {
      std::error_code rm;
      fs::remove(tmp, rm);
      throw IoError("short write to '" + tmp.string() + "'");
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code rm;
    fs::remove(tmp, rm);
    throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() +
                  "': " + ec.message());
  }
}

json load_json(const fs::path& path, const std::string& what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + what + " '" + path.string() + "'");
  }
  json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    throw IoError(what + " '" + path.string() + "' is not valid JSON");
  }
  return j;
}

double require_number(const json& j, const std::string& key,
                      const std::string& context) {
  if (!j.contains(key)) {
    throw IoError(context + ": missing key '" + key + "'");
  }
  if (!j.at(key).is_number()) {
    throw IoError(context + ": key '" + key + "' must be a number");
  }
  return j.at(key).get<double>();
}

std::string require_string(const json& j, const std::string& key,
                           const std::string& context) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw IoError(context + ": missing string key '" + key + "'");
  }
  return j.at(key).get<std::string>();
}

json spec_to_json(const TrialSpec& spec) {
  return json{{"requested_xi", spec.requested_xi},
              {"physical", to_string(spec.physical)},
              {"verbal", to_string(spec.verbal)},
              {"relative_timing_s", spec.relative_timing_s},
              {"duration_s", spec.duration_s},
              {"seed", spec.seed}};
}

TrialSpec spec_from_json(const json& j, const std::string& context) {
  TrialSpec spec;
  spec.requested_xi =
      static_cast<int>(require_number(j, "requested_xi", context));
  spec.physical = physical_from_string(require_string(j, "physical", context));
  spec.verbal = verbal_from_string(require_string(j, "verbal", context));
  spec.relative_timing_s =
      static_cast<int>(require_number(j, "relative_timing_s", context));
  spec.duration_s = require_number(j, "duration_s", context);
  if (!j.contains("seed") || !j.at("seed").is_number_unsigned()) {
    throw IoError(context + ": missing unsigned key 'seed'");
  }
  spec.seed = j.at("seed").get<std::uint64_t>();
  spec.validate();
  return spec;
}

constexpr const char* kSidecarKeys[] = {"format_version", "dt", "subject_id",
                                        "provenance", "requested_xi", "spec",
                                        "truth"};

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw Error("format_double: conversion failed");
  return std::string(buf, ptr);
}

fs::path sidecar_path(const fs::path& csv_path) {
  fs::path p = csv_path;
  p.replace_extension();  // drop .csv
  p += ".meta.json";
  return p;
}

TrialRecord read_trial(const fs::path& csv_path) {
  const std::string context = "trial '" + csv_path.string() + "'";

  // Sidecar first: it carries dt, which the time column is validated against.
  const json meta = load_json(sidecar_path(csv_path), context + " sidecar");
  if (!meta.is_object()) {
    throw IoError(context + " sidecar: expected a JSON object");
  }
  for (const auto& [key, value] : meta.items()) {
    bool known = false;
    for (const char* k : kSidecarKeys) known = known || key == k;
    if (!known) {
      throw IoError(context + " sidecar: unknown key '" + key + "'");
    }
  }
  const int version =
      static_cast<int>(require_number(meta, "format_version", context));
  if (version != kTrialFormatVersion) {
    throw IoError(context + ": format_version " + std::to_string(version) +
                  " not supported (expected " +
                  std::to_string(kTrialFormatVersion) + ")");
  }
  const double dt = require_number(meta, "dt", context);
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw IoError(context + ": dt must be positive");
  }

  TrialRecord record;
  record.subject_id = require_string(meta, "subject_id", context);
  record.provenance =
      provenance_from_string(require_string(meta, "provenance", context));
  if (meta.contains("requested_xi")) {
    if (!meta.at("requested_xi").is_number_integer()) {
      throw IoError(context + ": requested_xi must be an integer");
    }
    const int xi = meta.at("requested_xi").get<int>();
    if (xi < -1 || xi > 1) {
      throw IoError(context + ": requested_xi must be one of {-1, 0, +1}");
    }
    record.requested_xi = xi;
  }
  if (meta.contains("spec")) {
    record.spec = spec_from_json(meta.at("spec"), context + " spec");
    if (record.requested_xi.has_value() &&
        *record.requested_xi != record.spec->requested_xi) {
      throw IoError(context + ": requested_xi disagrees with spec");
    }
    record.requested_xi = record.spec->requested_xi;
  }

  // CSV body.
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open trial '" + csv_path.string() + "'");
  }
  std::string line;
  if (!std::getline(in, line) || (line != "t,c_p,c_v,y")) {
    throw IoError(context + ": first line must be the header 't,c_p,c_v,y'");
  }

  record.cues.dt = dt;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    const std::string where = context + " row " + std::to_string(row);

    std::array<std::string_view, 4> fields;
    std::string_view rest = line;
    for (int f = 0; f < 4; ++f) {
      const std::size_t comma = rest.find(',');
      if (f < 3) {
        if (comma == std::string_view::npos) {
          throw IoError(where + ": expected 4 columns");
        }
        fields[static_cast<std::size_t>(f)] = rest.substr(0, comma);
        rest.remove_prefix(comma + 1);
      } else {
        if (comma != std::string_view::npos) {
          throw IoError(where + ": expected 4 columns");
        }
        fields[static_cast<std::size_t>(f)] = rest;
      }
    }

    const double t = parse_double(fields[0], where);
    CueSample cue;
    cue.c_p = parse_double(fields[1], where);
    cue.c_v = parse_double(fields[2], where);
    const double y = parse_double(fields[3], where);
    if (!std::isfinite(t) || !std::isfinite(cue.c_p) || !std::isfinite(y)) {
      throw IoError(where + ": non-finite value");
    }
    if (cue.c_v != -1.0 && cue.c_v != 0.0 && cue.c_v != 1.0) {
      throw IoError(where + ": c_v must be one of {-1, 0, +1}");
    }
    record.cues.times.push_back(t);
    record.cues.samples.push_back(cue);
    record.measurements.push_back(y);
  }
  if (record.measurements.empty()) {
    throw IoError(context + ": no samples");
  }
  for (std::size_t i = 0; i < record.cues.times.size(); ++i) {
    const double expected =
        record.cues.times[0] + static_cast<double>(i) * dt;
    if (std::abs(record.cues.times[i] - expected) > 1e-6) {
      throw IoError(context + ": non-uniform time column at row " +
                    std::to_string(i + 1) + " (jitter > 1e-6 s)");
    }
  }

  // Ground truth, if recorded in the sidecar.
  if (meta.contains("truth")) {
    if (record.provenance == Provenance::Recorded) {
      throw IoError(context + ": recorded provenance cannot carry truth");
    }
    const json& truth = meta.at("truth");
    for (const char* key : {"x", "x_dot", "eta", "xi"}) {
      if (!truth.contains(key) || !truth.at(key).is_array()) {
        throw IoError(context + ": truth." + key + " missing or not an array");
      }
      if (truth.at(key).size() != record.measurements.size()) {
        throw IoError(context + ": truth." + std::string(key) +
                      " length differs from the sample count");
      }
    }
    std::vector<StateVector> states(record.measurements.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
      states[i].x = truth.at("x").at(i).get<double>();
      states[i].x_dot = truth.at("x_dot").at(i).get<double>();
      states[i].eta = truth.at("eta").at(i).get<double>();
      states[i].xi = truth.at("xi").at(i).get<double>();
      if (!states[i].finite()) {
        throw IoError(context + ": non-finite truth at tick " +
                      std::to_string(i));
      }
    }
    record.truth = std::move(states);
  }

  return record;
}

void write_trial(const TrialRecord& record, const fs::path& csv_path,
                 bool overwrite) {
  const std::size_t n = record.measurements.size();
  if (n == 0) {
    throw ValidationError("write_trial: empty measurement series");
  }
  if (record.cues.size() != n || record.cues.times.size() != n) {
    throw ValidationError("write_trial: series lengths differ");
  }
  if (record.truth.has_value() && record.truth->size() != n) {
    throw ValidationError("write_trial: truth length differs");
  }
  if (!(record.cues.dt > 0.0)) {
    throw ValidationError("write_trial: cue trace dt must be positive");
  }
  const fs::path meta_path = sidecar_path(csv_path);
  if (!overwrite && (fs::exists(csv_path) || fs::exists(meta_path))) {
    throw IoError("write_trial: '" + csv_path.string() +
                  "' exists; pass overwrite to replace it");
  }

  std::string csv = "t,c_p,c_v,y\n";
  for (std::size_t i = 0; i < n; ++i) {
    csv += format_double(record.cues.times[i]);
    csv += ',';
    csv += format_double(record.cues.samples[i].c_p);
    csv += ',';
    csv += format_double(record.cues.samples[i].c_v);
    csv += ',';
    csv += format_double(record.measurements[i]);
    csv += '\n';
  }

  json meta{{"format_version", kTrialFormatVersion},
            {"dt", record.cues.dt},
            {"subject_id", record.subject_id},
            {"provenance", to_string(record.provenance)}};
  if (record.requested_xi.has_value()) {
    meta["requested_xi"] = *record.requested_xi;
  }
  if (record.spec.has_value()) {
    meta["spec"] = spec_to_json(*record.spec);
  }
  if (record.truth.has_value()) {
    json truth;
    auto series = [&](auto member) {
      json arr = json::array();
      for (const StateVector& s : *record.truth) arr.push_back(s.*member);
      return arr;
    };
    truth["x"] = series(&StateVector::x);
    truth["x_dot"] = series(&StateVector::x_dot);
    truth["eta"] = series(&StateVector::eta);
    truth["xi"] = series(&StateVector::xi);
    meta["truth"] = std::move(truth);
  }

  atomic_write_text(meta_path, meta.dump(2) + "\n");
  atomic_write_text(csv_path, csv);
}

namespace {

struct ParamField {
  const char* name;
  double ModelParams::* member;
};

constexpr ParamField kParamFields[] = {
    {"lambda1", &ModelParams::lambda1}, {"k1", &ModelParams::k1},
    {"k2", &ModelParams::k2},           {"k3", &ModelParams::k3},
    {"k4", &ModelParams::k4},           {"dt", &ModelParams::dt},
    {"q_x", &ModelParams::q_x},         {"q_eta", &ModelParams::q_eta},
    {"q_xi", &ModelParams::q_xi},       {"r", &ModelParams::r},
};

}  // namespace

ModelParams read_params(const fs::path& path,
                        std::vector<std::string>* defaulted_keys) {
  const std::string context = "params '" + path.string() + "'";
  const json j = load_json(path, context);
  if (!j.is_object()) {
    throw IoError(context + ": expected a JSON object");
  }
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const ParamField& f : kParamFields) known = known || key == f.name;
    if (!known) {
      throw ValidationError(context + ": unknown key '" + key + "'");
    }
  }

  ModelParams params = ModelParams::defaults();
  for (const ParamField& f : kParamFields) {
    if (j.contains(f.name)) {
      if (!j.at(f.name).is_number()) {
        throw IoError(context + ": key '" + std::string(f.name) +
                      "' must be a number");
      }
      params.*(f.member) = j.at(f.name).get<double>();
    } else if (defaulted_keys != nullptr) {
      defaulted_keys->push_back(f.name);
    }
  }
  params.validate();
  return params;
}

void write_params(const ModelParams& params, const fs::path& path) {
  params.validate();
  json j;
  for (const ParamField& f : kParamFields) j[f.name] = params.*(f.member);
  atomic_write_text(path, j.dump(2) + "\n");
}

void write_manifest(const SuiteManifest& manifest, const fs::path& path) {
  json entries = json::array();
  for (const ManifestEntry& e : manifest.entries) {
    json entry = spec_to_json(e.spec);
    entry["file"] = e.file;
    entry["subject_id"] = e.subject_id;
    entry["judgeable"] = e.spec.judgeable();
    entries.push_back(std::move(entry));
  }
  json params;
  for (const ParamField& f : kParamFields) {
    params[f.name] = manifest.params.*(f.member);
  }
  const json j{{"format_version", kTrialFormatVersion},
               {"master_seed", manifest.master_seed},
               {"n_subjects", manifest.n_subjects},
               {"trials_per_subject", manifest.trials_per_subject},
               {"behavior", to_string(manifest.behavior)},
               {"params", params},
               {"trials", entries}};
  atomic_write_text(path, j.dump(2) + "\n");
}

SuiteManifest read_manifest(const fs::path& path) {
  const std::string context = "manifest '" + path.string() + "'";
  const json j = load_json(path, context);
  if (!j.is_object()) throw IoError(context + ": expected a JSON object");
  const int version =
      static_cast<int>(require_number(j, "format_version", context));
  if (version != kTrialFormatVersion) {
    throw IoError(context + ": format_version " + std::to_string(version) +
                  " not supported");
  }

  SuiteManifest manifest;
  if (!j.contains("master_seed") || !j.at("master_seed").is_number_unsigned()) {
    throw IoError(context + ": missing unsigned key 'master_seed'");
  }
  manifest.master_seed = j.at("master_seed").get<std::uint64_t>();
  manifest.n_subjects =
      static_cast<int>(require_number(j, "n_subjects", context));
  manifest.trials_per_subject =
      static_cast<int>(require_number(j, "trials_per_subject", context));
  manifest.behavior =
      behavior_from_string(require_string(j, "behavior", context));
  if (!j.contains("params") || !j.at("params").is_object()) {
    throw IoError(context + ": missing object key 'params'");
  }
  for (const ParamField& f : kParamFields) {
    manifest.params.*(f.member) =
        require_number(j.at("params"), f.name, context + " params");
  }
  manifest.params.validate();
  if (!j.contains("trials") || !j.at("trials").is_array()) {
    throw IoError(context + ": missing array key 'trials'");
  }
  for (const json& entry : j.at("trials")) {
    ManifestEntry e;
    e.file = require_string(entry, "file", context + " trial entry");
    e.subject_id =
        require_string(entry, "subject_id", context + " trial entry");
    e.spec = spec_from_json(entry, context + " trial entry");
    manifest.entries.push_back(std::move(e));
  }
  return manifest;
}

void write_trace(const FilterTrace& trace, double dt, const fs::path& path) {
  json means = json::array();
  json covs = json::array();
  for (const StateEstimate& est : trace.estimates) {
    means.push_back({est.mean[0], est.mean[1], est.mean[2], est.mean[3]});
    json cov = json::array();
    for (int i = 0; i < 4; ++i) {
      cov.push_back({est.cov(i, 0), est.cov(i, 1), est.cov(i, 2),
                     est.cov(i, 3)});
    }
    covs.push_back(std::move(cov));
  }
  const json j{{"format_version", kTrialFormatVersion},
               {"dt", dt},
               {"state_order", {"x", "x_dot", "eta", "xi"}},
               {"times", trace.times},
               {"means", means},
               {"covariances", covs},
               {"innovations", trace.innovations},
               {"innovation_vars", trace.innovation_vars}};
  atomic_write_text(path, j.dump() + "\n");
}

void write_plot_csv(const FilterTrace& trace, const TrialRecord& record,
                    const fs::path& path) {
  if (trace.estimates.size() != record.measurements.size()) {
    throw ValidationError("write_plot_csv: trace and trial lengths differ");
  }
  std::string csv =
      "t,y,x_hat,x_lo,x_hi,eta_hat,eta_lo,eta_hi,xi_hat,xi_lo,xi_hi\n";
  for (std::size_t i = 0; i < trace.estimates.size(); ++i) {
    const StateEstimate& est = trace.estimates[i];
    auto band = [&](int k) {
      const double sd = std::sqrt(std::max(0.0, est.cov(k, k)));
      return std::pair{est.mean[k] - 2.0 * sd, est.mean[k] + 2.0 * sd};
    };
    const auto [x_lo, x_hi] = band(0);
    const auto [eta_lo, eta_hi] = band(2);
    const auto [xi_lo, xi_hi] = band(3);
    csv += format_double(trace.times[i]);
    for (double v : {record.measurements[i], est.mean[0], x_lo, x_hi,
                     est.mean[2], eta_lo, eta_hi, est.mean[3], xi_lo, xi_hi}) {
      csv += ',';
      csv += format_double(v);
    }
    csv += '\n';
  }
  atomic_write_text(path, csv);
}

namespace {

json conditional_to_json(const ConditionalTable& table) {
  json pct = json::array();
  for (int i = 0; i < 3; ++i) {
    json row = json::array();
    for (int j = 0; j < 3; ++j) {
      const double v =
          table.pct[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (std::isnan(v)) {
        row.push_back(nullptr);
      } else {
        row.push_back(v);
      }
    }
    pct.push_back(std::move(row));
  }
  return json{{"pct", pct},
              {"defined", {table.defined[0], table.defined[1],
                           table.defined[2]}}};
}

}  // namespace

void write_report(const EvaluationReport& report, const fs::path& path) {
  json counts = json::array();
  for (const auto& row : report.confusion.counts) {
    counts.push_back({row[0], row[1], row[2]});
  }
  json per_class = json::array();
  for (double acc : report.per_class_accuracy) {
    if (std::isnan(acc)) {
      per_class.push_back(nullptr);
    } else {
      per_class.push_back(acc);
    }
  }
  json outcomes = json::array();
  for (const TrialOutcome& o : report.outcomes) {
    outcomes.push_back({{"id", o.id},
                        {"requested_xi", o.requested_xi},
                        {"verdict", o.verdict.value},
                        {"sampled_xi", o.verdict.sampled_xi},
                        {"sample_time", o.verdict.sample_time}});
  }
  json exclusions = json::array();
  for (const Exclusion& e : report.exclusions) {
    exclusions.push_back({{"id", e.id}, {"reason", e.reason}});
  }
  const json j{
      {"format_version", kTrialFormatVersion},
      {"n_records", report.n_records},
      {"n_judged", report.outcomes.size()},
      {"axis_order", {-1, 0, 1}},
      {"confusion_counts", counts},
      {"conditional_by_requested", conditional_to_json(report.by_requested)},
      {"conditional_by_estimated", conditional_to_json(report.by_estimated)},
      {"per_class_accuracy", per_class},
      {"overall_accuracy", report.confusion.total() > 0
                               ? json(report.overall_accuracy)
                               : json(nullptr)},
      {"outcomes", outcomes},
      {"exclusions", exclusions}};
  atomic_write_text(path, j.dump(2) + "\n");
}

}  // namespace coop
