// Command-line front end: simulate / filter / judge / suite / evaluate.
//
// Exit codes: 0 success, 1 I/O failure, 2 usage or validation error,
// 3 unjudgeable trial.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "coop/errors.hpp"
#include "coop/evaluation.hpp"
#include "coop/judgment.hpp"
#include "coop/kalman.hpp"
#include "coop/records.hpp"
#include "coop/simulator.hpp"
#include "coop/trial_io.hpp"

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct CommonOpts {
  std::string params_path;
  int threads = 0;
};

// --params beats COOP_FILTER_CONFIG beats compiled defaults.
coop::ModelParams load_params(const CommonOpts& opts) {
  std::string path = opts.params_path;
  if (path.empty()) {
    if (const char* env = std::getenv("COOP_FILTER_CONFIG")) path = env;
  }
  if (path.empty()) return coop::ModelParams::defaults();

  std::vector<std::string> defaulted;
  coop::ModelParams params = coop::read_params(path, &defaulted);
  if (!defaulted.empty()) {
    std::cerr << "warning: '" << path << "' missing keys, using defaults for:";
    for (const std::string& key : defaulted) std::cerr << " " << key;
    std::cerr << "\n";
  }
  return params;
}

std::string pad2(int v) {
  return (v < 10 ? "0" : "") + std::to_string(v);
}

void write_suite_files(const std::vector<coop::TrialSpec>& specs,
                       const std::vector<coop::TrialRecord>& records,
                       int n_subjects, int trials_per_subject,
                       std::uint64_t master_seed, coop::BehaviorMode behavior,
                       const coop::ModelParams& params, const fs::path& out_dir,
                       bool force, bool print_paths) {
  fs::create_directories(out_dir);
  coop::SuiteManifest manifest;
  manifest.master_seed = master_seed;
  manifest.n_subjects = n_subjects;
  manifest.trials_per_subject = trials_per_subject;
  manifest.behavior = behavior;
  manifest.params = params;

  for (std::size_t k = 0; k < records.size(); ++k) {
    const int subject = static_cast<int>(k) / trials_per_subject + 1;
    const int index = static_cast<int>(k) % trials_per_subject + 1;
    const std::string file =
        "trial_" + pad2(subject) + "_" + pad2(index) + ".csv";
    coop::write_trial(records[k], out_dir / file, force);
    manifest.entries.push_back(
        {file, records[k].subject_id, specs[k]});
    if (print_paths) std::cout << (out_dir / file).string() << "\n";
  }
  // The manifest is written last, once every trial file is in place.
  coop::write_manifest(manifest, out_dir / "manifest.json");
  std::cout << (out_dir / "manifest.json").string() << "\n";
}

int cmd_simulate(const CommonOpts& common, const coop::TrialSpec& spec,
                 const std::string& behavior_name, const std::string& out_dir,
                 const std::string& name, const std::string& subject,
                 bool free_xi, bool force) {
  const coop::ModelParams params = load_params(common);
  const coop::BehaviorMode behavior =
      coop::behavior_from_string(behavior_name);
  coop::TrialRecord record =
      coop::simulate_trial(spec, params, behavior, /*hold_xi=*/!free_xi);
  record.subject_id = subject;

  const fs::path csv = fs::path(out_dir) / (name + ".csv");
  fs::create_directories(fs::path(out_dir));
  coop::write_trial(record, csv, force);
  std::cout << csv.string() << "\n";

  coop::SuiteManifest manifest;
  manifest.master_seed = spec.seed;
  manifest.n_subjects = 1;
  manifest.trials_per_subject = 1;
  manifest.behavior = behavior;
  manifest.params = params;
  manifest.entries.push_back({name + ".csv", subject, spec});
  const fs::path manifest_path = fs::path(out_dir) / (name + ".manifest.json");
  coop::write_manifest(manifest, manifest_path);
  std::cout << manifest_path.string() << "\n";
  return 0;
}

int cmd_filter(const CommonOpts& common, const std::string& trial_path,
               const std::string& out_stem) {
  const coop::ModelParams params = load_params(common);
  const coop::TrialRecord record = coop::read_trial(trial_path);
  const coop::FilterTrace trace = coop::filter_trial(record, params);

  std::string stem = out_stem;
  if (stem.empty()) {
    fs::path p(trial_path);
    p.replace_extension();
    stem = p.string();
  }
  coop::write_trace(trace, params.dt, stem + ".trace.json");
  coop::write_plot_csv(trace, record, stem + ".plot.csv");
  std::cout << stem + ".trace.json" << "\n" << stem + ".plot.csv" << "\n";
  return 0;
}

int cmd_judge(const CommonOpts& common, const std::string& trial_path,
              const coop::JudgmentConfig& cfg, const std::string& json_out) {
  const coop::ModelParams params = load_params(common);
  const coop::TrialRecord record = coop::read_trial(trial_path);
  const coop::FilterTrace trace = coop::filter_trial(record, params);
  const double onset = coop::detect_cue_onset(record.cues);
  const coop::Verdict verdict = coop::judge(trace, record.cues, cfg);

  const std::string sign = verdict.value > 0 ? "+1" : verdict.value < 0 ? "-1"
                                                                        : "0";
  std::cout << sign << " (xi_hat=" << coop::format_double(verdict.sampled_xi)
            << " at t=" << coop::format_double(verdict.sample_time) << " s)\n";

  if (!json_out.empty()) {
    nlohmann::json j{{"verdict", verdict.value},
                     {"sampled_xi", verdict.sampled_xi},
                     {"sample_time", verdict.sample_time},
                     {"cue_onset", onset},
                     {"delay_s", cfg.delay_s},
                     {"threshold", cfg.threshold}};
    std::ofstream out(json_out, std::ios::binary | std::ios::trunc);
    if (!out) throw coop::IoError("cannot open '" + json_out + "'");
    out << j.dump(2) << "\n";
  }
  return 0;
}

int cmd_suite(const CommonOpts& common, int n_subjects, int trials_per_subject,
              std::uint64_t seed, const std::string& behavior_name,
              const std::string& out_dir, bool free_xi, bool force) {
  if (n_subjects < 1 || trials_per_subject < 1) {
    throw coop::ValidationError("suite: --subjects and --trials must be >= 1");
  }
  const coop::ModelParams params = load_params(common);
  const coop::BehaviorMode behavior =
      coop::behavior_from_string(behavior_name);
  const std::vector<coop::TrialSpec> specs =
      coop::generate_trial_suite(n_subjects, trials_per_subject, seed);
  const std::vector<coop::TrialRecord> records = coop::simulate_suite(
      specs, trials_per_subject, params, behavior, !free_xi, common.threads);
  write_suite_files(specs, records, n_subjects, trials_per_subject, seed,
                    behavior, params, out_dir, force, /*print_paths=*/false);
  std::cout << records.size() << " trials written to " << out_dir << "\n";
  return 0;
}

int cmd_evaluate(const CommonOpts& common, const std::string& manifest_path,
                 const coop::JudgmentConfig& cfg, const std::string& report_out,
                 const std::string& sweep_spec, const std::string& sweep_out) {
  const coop::SuiteManifest manifest = coop::read_manifest(manifest_path);
  if (manifest.entries.empty()) {
    throw coop::ValidationError("evaluate: manifest lists no trials");
  }
  // Model constants travel with the suite; an explicit --params overrides.
  coop::ModelParams params = manifest.params;
  if (!common.params_path.empty() ||
      std::getenv("COOP_FILTER_CONFIG") != nullptr) {
    params = load_params(common);
  }

  const fs::path base = fs::path(manifest_path).parent_path();
  std::vector<coop::TrialRecord> records;
  records.reserve(manifest.entries.size());
  for (const coop::ManifestEntry& entry : manifest.entries) {
    records.push_back(coop::read_trial(base / entry.file));
  }

  const coop::EvaluationReport report =
      coop::evaluate_suite(records, params, cfg, common.threads);
  coop::render_tables(report, std::cout);
  if (!report_out.empty()) {
    coop::write_report(report, report_out);
    std::cout << "report written to " << report_out << "\n";
  }

  if (!sweep_spec.empty()) {
    double lo = 0.0, hi = 0.0, step = 0.0;
    char c1 = 0, c2 = 0;
    std::istringstream ss(sweep_spec);
    ss >> lo >> c1 >> hi >> c2 >> step;
    if (!ss || c1 != ':' || c2 != ':' || !ss.eof()) {
      throw coop::ValidationError(
          "evaluate: --sweep-threshold expects lo:hi:step");
    }
    const std::vector<coop::SweepPoint> sweep = coop::threshold_sweep(
        records, params, cfg, lo, hi, step, common.threads);
    std::ostringstream csv;
    csv << "threshold,overall_accuracy,acc_uncoop,acc_unresp,acc_coop,"
           "n_judged\n";
    for (const coop::SweepPoint& p : sweep) {
      csv << coop::format_double(p.threshold) << ","
          << coop::format_double(p.overall_accuracy);
      for (double acc : p.per_class_accuracy) {
        csv << "," << coop::format_double(acc);
      }
      csv << "," << p.n_judged << "\n";
    }
    if (sweep_out.empty()) {
      std::cout << csv.str();
    } else {
      std::ofstream out(sweep_out, std::ios::binary | std::ios::trunc);
      if (!out) throw coop::IoError("cannot open '" + sweep_out + "'");
      out << csv.str();
      std::cout << "sweep written to " << sweep_out << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperativeness estimation toolkit: three-stage cue-response "
               "model, Kalman filter, delay-and-threshold judgment"};
  app.require_subcommand(1);
  app.fallthrough();

  CommonOpts common;
  app.add_option("--params", common.params_path,
                 "model parameter JSON (default: $COOP_FILTER_CONFIG, then "
                 "built-in defaults)");
  app.add_option("--threads", common.threads,
                 "worker threads for suite/evaluate (0 = auto)");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "generate one trial");
  coop::TrialSpec spec;
  std::string physical = "none", verbal = "none", behavior = "model";
  std::string out_dir = ".", name = "trial", subject = "sim";
  bool free_xi = false, force = false;
  simulate->add_option("--xi", spec.requested_xi, "requested cooperativeness")
      ->required()
      ->check(CLI::IsMember({-1, 0, 1}));
  simulate->add_option("--physical", physical, "physical cue intensity")
      ->check(CLI::IsMember({"none", "soft", "hard"}));
  simulate->add_option("--verbal", verbal, "verbal cue")
      ->check(CLI::IsMember({"none", "back", "forward"}));
  simulate
      ->add_option("--timing", spec.relative_timing_s,
                   "verbal minus physical onset, s (both cues only)")
      ->check(CLI::Range(-4, 4));
  simulate->add_option("--duration", spec.duration_s, "trial length, s")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--seed", spec.seed, "trial RNG seed");
  simulate->add_option("--behavior", behavior, "behavior mode")
      ->check(CLI::IsMember({"model", "frozen-uncooperative"}));
  simulate->add_flag("--free-xi", free_xi,
                     "let xi random-walk instead of holding the requested "
                     "value");
  simulate->add_option("--out", out_dir, "output directory");
  simulate->add_option("--name", name, "output file stem");
  simulate->add_option("--subject", subject, "subject label");
  simulate->add_flag("--force", force, "overwrite existing files");

  // filter
  auto* filter = app.add_subcommand("filter", "filter a trial file");
  std::string trial_path, out_stem;
  filter->add_option("trial", trial_path, "trial CSV")->required();
  filter->add_option("--out", out_stem,
                     "output stem (default: trial path without .csv)");

  // judge
  auto* judge = app.add_subcommand("judge", "filter and judge a trial file");
  coop::JudgmentConfig cfg;
  std::string judge_trial, json_out;
  judge->add_option("trial", judge_trial, "trial CSV")->required();
  judge->add_option("--delay", cfg.delay_s, "seconds after cue onset")
      ->check(CLI::NonNegativeNumber);
  judge->add_option("--threshold", cfg.threshold, "dead-band half-width");
  judge->add_option("--json", json_out, "also write the verdict as JSON");

  // suite
  auto* suite = app.add_subcommand("suite", "generate a trial suite");
  int n_subjects = 4, trials_per_subject = 25;
  std::uint64_t master_seed = 0;
  std::string suite_out = "suite", suite_behavior = "model";
  bool suite_free_xi = false, suite_force = false;
  suite->add_option("--subjects", n_subjects, "number of subjects");
  suite->add_option("--trials", trials_per_subject, "trials per subject");
  suite->add_option("--seed", master_seed, "master seed");
  suite->add_option("--behavior", suite_behavior, "behavior mode")
      ->check(CLI::IsMember({"model", "frozen-uncooperative"}));
  suite->add_flag("--free-xi", suite_free_xi, "let xi random-walk");
  suite->add_option("--out", suite_out, "output directory");
  suite->add_flag("--force", suite_force, "overwrite existing files");

  // evaluate
  auto* evaluate =
      app.add_subcommand("evaluate", "run the Tables I-III analysis");
  coop::JudgmentConfig eval_cfg;
  std::string manifest_path, report_out, sweep_spec, sweep_out;
  evaluate->add_option("manifest", manifest_path, "suite manifest JSON")
      ->required();
  evaluate->add_option("--delay", eval_cfg.delay_s, "seconds after cue onset")
      ->check(CLI::NonNegativeNumber);
  evaluate->add_option("--threshold", eval_cfg.threshold,
                       "dead-band half-width");
  evaluate->add_option("--out", report_out, "write the report JSON here");
  evaluate->add_option("--sweep-threshold", sweep_spec,
                       "emit accuracy vs threshold for lo:hi:step");
  evaluate->add_option("--sweep-out", sweep_out,
                       "write the sweep CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) {
      spec.physical = coop::physical_from_string(physical);
      spec.verbal = coop::verbal_from_string(verbal);
      spec.validate();
      return cmd_simulate(common, spec, behavior, out_dir, name, subject,
                          free_xi, force);
    }
    if (filter->parsed()) return cmd_filter(common, trial_path, out_stem);
    if (judge->parsed()) {
      cfg.validate();
      return cmd_judge(common, judge_trial, cfg, json_out);
    }
    if (suite->parsed()) {
      return cmd_suite(common, n_subjects, trials_per_subject, master_seed,
                       suite_behavior, suite_out, suite_free_xi, suite_force);
    }
    if (evaluate->parsed()) {
      eval_cfg.validate();
      return cmd_evaluate(common, manifest_path, eval_cfg, report_out,
                          sweep_spec, sweep_out);
    }
  } catch (const coop::UnjudgeableError& e) {
    std::cerr << "unjudgeable: " << e.what() << "\n";
    return 3;
  } catch (const coop::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const coop::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
