// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Tolerances are pinned in code next to each check.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "coop/errors.hpp"
#include "coop/evaluation.hpp"
#include "coop/judgment.hpp"
#include "coop/kalman.hpp"
#include "coop/model.hpp"
#include "coop/records.hpp"
#include "coop/reference_filter.hpp"
#include "coop/simulator.hpp"
#include "coop/trial_io.hpp"

using namespace coop;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(const std::string& name, bool pass, const std::string& detail) {
  std::cout << (pass ? "PASS  " : "FAIL  ") << name << " — " << detail << "\n";
  if (!pass) ++g_failures;
}

void run(const std::string& name,
         const std::function<std::pair<bool, std::string>()>& body) {
  try {
    const auto [pass, detail] = body();
    report(name, pass, detail);
  } catch (const std::exception& e) {
    report(name, false, std::string("exception: ") + e.what());
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

ref::Estimate to_ref(const StateEstimate& est) {
  ref::Estimate out;
  for (int i = 0; i < 4; ++i) {
    out.mean[static_cast<std::size_t>(i)] = est.mean[i];
    for (int j = 0; j < 4; ++j) {
      out.cov[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          est.cov(i, j);
    }
  }
  return out;
}

TrialSpec random_judgeable_spec(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick3(0, 2);
  std::uniform_int_distribution<int> timing(-4, 4);
  TrialSpec spec;
  do {
    spec.requested_xi = pick3(rng) - 1;
    spec.physical = static_cast<PhysicalIntensity>(pick3(rng));
    spec.verbal = static_cast<VerbalCue>(pick3(rng));
  } while (!spec.judgeable());
  spec.relative_timing_s = timing(rng);
  spec.duration_s = 5.0;
  spec.seed = rng();
  return spec;
}

// ---------------------------------------------------------------------------

std::pair<bool, std::string> oracle_equivalence() {
  const auto start = Clock::now();
  std::mt19937_64 rng(0xACCE5501);
  const ModelParams p = ModelParams::defaults();
  double worst = 0.0;
  const int n_trials = 20;
  for (int t = 0; t < n_trials; ++t) {
    const TrialSpec spec = random_judgeable_spec(rng);
    const TrialRecord record = simulate_trial(spec, p);
    const StateEstimate init =
        default_initial_estimate(record.measurements.front());
    for (const bool joseph : {true, false}) {
      const FilterTrace trace = filter_trial(
          record, p, init,
          joseph ? CovarianceForm::Joseph : CovarianceForm::Simple);
      const ref::Trace expected =
          ref::filter_trial_reference(record, p, to_ref(init), joseph);
      for (std::size_t i = 0; i < trace.estimates.size(); ++i) {
        for (int a = 0; a < 4; ++a) {
          worst = std::max(worst,
                           std::abs(trace.estimates[i].mean[a] -
                                    expected.estimates[i]
                                        .mean[static_cast<std::size_t>(a)]));
          for (int b = 0; b < 4; ++b) {
            worst = std::max(
                worst,
                std::abs(trace.estimates[i].cov(a, b) -
                         expected.estimates[i].cov[static_cast<std::size_t>(a)]
                                                  [static_cast<std::size_t>(b)]));
          }
        }
      }
    }
  }
  const double elapsed = seconds_since(start);
  const bool pass = worst <= 1e-9 && elapsed < 5.0;
  return {pass, "max |main - reference| = " + fmt(worst) + " over " +
                    std::to_string(n_trials) + " trials, both forms (" +
                    fmt(elapsed) + " s, cap 5 s)"};
}

std::pair<bool, std::string> covariance_health() {
  std::mt19937_64 rng(0xACCE5502);
  const ModelParams p = ModelParams::defaults();
  long ticks = 0;
  for (int t = 0; t < 20; ++t) {
    const TrialSpec spec = random_judgeable_spec(rng);
    const TrialRecord record = simulate_trial(spec, p);
    for (const CovarianceForm form :
         {CovarianceForm::Joseph, CovarianceForm::Simple}) {
      const FilterTrace trace = filter_trial(record, p, form);
      for (const StateEstimate& est : trace.estimates) {
        est.validate_health();  // throws on violation
        ++ticks;
      }
    }
  }
  return {true, "symmetry (rel 1e-12) and PSD (min eig >= -1e-9*trace) held "
                "at all " + std::to_string(ticks) + " ticks"};
}

std::pair<bool, std::string> xi_unobservability() {
  const ModelParams p = ModelParams::defaults();
  TrialSpec spec;  // all-None: no cue anywhere
  spec.requested_xi = 0;
  spec.duration_s = 5.0;
  spec.seed = 4242;
  const TrialRecord record = simulate_trial(spec, p);
  const FilterTrace trace = filter_trial(record, p);
  const double xi0 = 0.0;  // default init
  double worst = 0.0;
  double worst_coupling = 0.0;
  for (const StateEstimate& est : trace.estimates) {
    worst = std::max(worst, std::abs(est.mean[3] - xi0));
    for (int k = 0; k < 3; ++k) {
      worst_coupling = std::max(worst_coupling, std::abs(est.cov(3, k)));
    }
  }
  const bool pass = worst <= 1e-12 && worst_coupling <= 1e-12;
  return {pass, "max |xi_hat - xi_hat_0| = " + fmt(worst) +
                    ", max |cross-cov| = " + fmt(worst_coupling) +
                    " over 5 s of zero cues"};
}

std::pair<bool, std::string> statistical_consistency() {
  const auto start = Clock::now();
  const ModelParams p = ModelParams::defaults();
  const int n_trials = 500;

  StateEstimate init;
  init.mean = Vec4::Zero();
  init.cov = Vec4{1e-4, 1e-2, 1e-2, 1.0}.asDiagonal();
  const Vec4 init_sd = init.cov.diagonal().cwiseSqrt();

  double nees_sum = 0.0, nis_sum = 0.0;
  long nees_n = 0, nis_n = 0;

  for (int t = 0; t < n_trials; ++t) {
    std::mt19937_64 rng(mix_seed(0xACCE5504, static_cast<std::uint64_t>(t), 1));
    std::normal_distribution<double> gauss(0.0, 1.0);
    TrialSpec spec = random_judgeable_spec(rng);
    const CueTrace cues = generate_cue_schedule(spec, p);

    // Truth drawn from exactly the filter's prior and noise model.
    StateVector state;
    state.x = init.mean[0] + gauss(rng) * init_sd[0];
    state.x_dot = init.mean[1] + gauss(rng) * init_sd[1];
    state.eta = init.mean[2] + gauss(rng) * init_sd[2];
    state.xi = init.mean[3] + gauss(rng) * init_sd[3];

    const double sd_x = std::sqrt(p.dt * p.q_x);
    const double sd_eta = std::sqrt(p.dt * p.q_eta);
    const double sd_xi = std::sqrt(p.dt * p.q_xi);
    const double sd_v = std::sqrt(p.r);

    TrialRecord record;
    record.cues = cues;
    record.truth.emplace();
    for (std::size_t i = 0; i < cues.size(); ++i) {
      NoiseDraw noise{gauss(rng) * sd_x, gauss(rng) * sd_eta,
                      gauss(rng) * sd_xi};
      state = step_truth(state, cues.samples[i], p, noise);
      record.truth->push_back(state);
      record.measurements.push_back(measure(state, gauss(rng) * sd_v));
    }

    const FilterTrace trace = filter_trial(record, p, init);
    for (std::size_t i = 0; i < trace.estimates.size(); ++i) {
      const Vec4 err =
          (*record.truth)[i].as_vector() - trace.estimates[i].mean;
      const Vec4 solved = trace.estimates[i].cov.ldlt().solve(err);
      nees_sum += err.dot(solved);
      ++nees_n;
      const double z = trace.innovations[i];
      nis_sum += z * z / trace.innovation_vars[i];
      ++nis_n;
    }
  }
  const double mean_nees = nees_sum / static_cast<double>(nees_n);
  const double mean_nis = nis_sum / static_cast<double>(nis_n);
  const double elapsed = seconds_since(start);
  const bool pass = mean_nees >= 3.4 && mean_nees <= 4.6 && mean_nis >= 0.85 &&
                    mean_nis <= 1.15 && elapsed < 30.0;
  return {pass, "mean NEES = " + fmt(mean_nees) +
                    " (target [3.4, 4.6]), mean NIS = " + fmt(mean_nis) +
                    " (target [0.85, 1.15]) over " + std::to_string(n_trials) +
                    " self-consistent trials (" + fmt(elapsed) +
                    " s, cap 30 s)"};
}

std::pair<bool, std::string> judgment_accuracy() {
  const auto start = Clock::now();
  const ModelParams p = ModelParams::defaults();
  const std::uint64_t master_seed = 20260810;
  const std::vector<TrialSpec> specs = generate_trial_suite(4, 25, master_seed);
  const std::vector<TrialRecord> records =
      simulate_suite(specs, 25, p, BehaviorMode::Model);
  const EvaluationReport report =
      evaluate_suite(records, p, JudgmentConfig{0.75, 0.3});

  const double elapsed = seconds_since(start);
  bool pass = elapsed < 30.0;
  std::string rates;
  static const char* kNames[3] = {"uncoop", "unresp", "coop"};
  for (int i = 0; i < 3; ++i) {
    const double acc = report.per_class_accuracy[static_cast<std::size_t>(i)];
    pass = pass && !std::isnan(acc) && acc >= 0.90;
    rates += std::string(kNames[i]) + " " + fmt(acc) + " ";
  }
  return {pass, "per-class correct rates: " + rates + "(target >= 0.90 each; "
                    "seed " + std::to_string(master_seed) + ", " +
                    std::to_string(report.outcomes.size()) + "/" +
                    std::to_string(records.size()) + " judged, " +
                    fmt(elapsed) + " s, cap 30 s)"};
}

std::pair<bool, std::string> frozen_uncooperative_pattern() {
  const ModelParams p = ModelParams::defaults();
  const std::uint64_t master_seed = 20260810;
  const std::vector<TrialSpec> specs = generate_trial_suite(4, 25, master_seed);
  const std::vector<TrialRecord> records = simulate_suite(
      specs, 25, p, BehaviorMode::FrozenUncooperative);
  const EvaluationReport report =
      evaluate_suite(records, p, JudgmentConfig{0.75, 0.3});

  // Verbal-only uncooperative trials: the frozen subject does nothing, so the
  // judgment should land in the dead band.
  std::map<int, int> verdicts;
  int subset = 0;
  for (const TrialOutcome& outcome : report.outcomes) {
    const auto idx = static_cast<std::size_t>(
        std::stoi(outcome.id.substr(outcome.id.find('#') + 1)));
    const TrialSpec& spec = specs[idx];
    if (spec.requested_xi == -1 && spec.physical == PhysicalIntensity::None &&
        spec.verbal != VerbalCue::None) {
      ++verdicts[outcome.verdict.value];
      ++subset;
    }
  }
  int modal_verdict = 0, modal_count = -1;
  for (const auto& [verdict, count] : verdicts) {
    if (count > modal_count) {
      modal_count = count;
      modal_verdict = verdict;
    }
  }
  const bool pass = subset >= 4 && modal_verdict == 0;
  return {pass, "verbal-only uncooperative trials: n = " +
                    std::to_string(subset) + ", judged unresponsive " +
                    std::to_string(verdicts[0]) + "x, uncooperative " +
                    std::to_string(verdicts[-1]) + "x, cooperative " +
                    std::to_string(verdicts[1]) + "x (mode must be "
                    "unresponsive)"};
}

std::pair<bool, std::string> table_arithmetic_fixture() {
  ConfusionMatrix m;
  m.counts = {{{11, 20, 1}, {4, 19, 1}, {1, 20, 23}}};
  const ConditionalTable by_req = conditional_by_requested(m);
  const ConditionalTable by_est = conditional_by_estimated(m);
  const bool pass = by_req.pct[1][1] == 79.2 && by_req.pct[0][0] == 34.4 &&
                    by_req.pct[2][2] == 52.3 && by_est.pct[2][2] == 92.0 &&
                    by_est.pct[0][0] == 68.8;
  std::ostringstream os;
  os << "rows 19/24 -> " << by_req.pct[1][1] << ", 11/32 -> "
     << by_req.pct[0][0] << ", 23/44 -> " << by_req.pct[2][2]
     << "; columns 23/25 -> " << by_est.pct[2][2] << ", 11/16 -> "
     << by_est.pct[0][0] << " (need exactly 79.2 / 34.4 / 52.3 / 92 / 68.8)";
  return {pass, os.str()};
}

std::pair<bool, std::string> threshold_rule_check() {
  const double dt = 0.01;
  const std::size_t n = 300;
  CueTrace cues;
  cues.dt = dt;
  for (std::size_t i = 0; i < n; ++i) {
    cues.times.push_back(static_cast<double>(i) * dt);
    cues.samples.push_back(CueSample{});
  }
  cues.samples[50].c_v = 1.0;  // onset 0.5 s

  auto make_trace = [&](const std::function<double(double)>& xi_of_t) {
    FilterTrace trace;
    trace.times = cues.times;
    for (std::size_t i = 0; i < n; ++i) {
      StateEstimate est;
      est.mean = Vec4{0.0, 0.0, 0.0, xi_of_t(cues.times[i])};
      est.cov = Vec4{1e-4, 1e-2, 1e-2, 0.5}.asDiagonal();
      trace.estimates.push_back(est);
      trace.innovations.push_back(0.0);
      trace.innovation_vars.push_back(1.0);
    }
    return trace;
  };
  const JudgmentConfig cfg{0.75, 0.3};

  // Ramp crossing 0.3 at ~0.86 s (before onset + 0.75 s), sampled at 0.5.
  const FilterTrace ramp = make_trace([](double t) {
    return t < 0.5 ? 0.0 : std::min(0.5, (t - 0.5) * (0.5 / 0.6));
  });
  bool crossed_early = false;
  for (std::size_t i = 0; i < ramp.times.size(); ++i) {
    if (ramp.times[i] > 0.5 && ramp.times[i] < 1.25 &&
        ramp.estimates[i].mean[3] > 0.3) {
      crossed_early = true;
      break;
    }
  }
  const Verdict v_ramp = judge(ramp, cues, cfg);

  const Verdict v_plus =
      judge(make_trace([](double) { return 0.3; }), cues, cfg);
  const Verdict v_minus =
      judge(make_trace([](double) { return -0.3; }), cues, cfg);
  const Verdict v_inside =
      judge(make_trace([](double) { return 0.299; }), cues, cfg);

  const bool pass = crossed_early && v_ramp.value == 1 &&
                    v_ramp.sampled_xi == 0.5 && v_plus.value == 1 &&
                    v_minus.value == -1 && v_inside.value == 0;
  return {pass, "ramp crossing 0.3 pre-delay sampled at 0.5 -> " +
                    std::to_string(v_ramp.value) + "; boundaries +0.3 -> " +
                    std::to_string(v_plus.value) + ", -0.3 -> " +
                    std::to_string(v_minus.value) + " (inclusive), 0.299 -> " +
                    std::to_string(v_inside.value)};
}

std::pair<bool, std::string> io_robustness() {
  const fs::path dir =
      fs::temp_directory_path() / "coop_acceptance_io";
  fs::remove_all(dir);
  fs::create_directories(dir);

  std::mt19937_64 rng(0xACCE5509);
  const ModelParams p = ModelParams::defaults();

  // Round trips over simulator output.
  int round_trips = 0;
  for (int i = 0; i < 20; ++i) {
    const TrialSpec spec = random_judgeable_spec(rng);
    TrialRecord record = simulate_trial(spec, p);
    record.subject_id = "acc-" + std::to_string(i);
    const fs::path csv = dir / ("t" + std::to_string(i) + ".csv");
    write_trial(record, csv);
    const TrialRecord back = read_trial(csv);
    if (back.measurements != record.measurements ||
        back.cues.times != record.cues.times ||
        back.subject_id != record.subject_id ||
        back.spec != record.spec || !back.truth.has_value()) {
      fs::remove_all(dir);
      return {false, "round-trip mismatch on trial " + std::to_string(i)};
    }
    for (std::size_t k = 0; k < record.truth->size(); ++k) {
      if ((*back.truth)[k].xi != (*record.truth)[k].xi ||
          (*back.truth)[k].eta != (*record.truth)[k].eta) {
        fs::remove_all(dir);
        return {false, "truth round-trip mismatch on trial " +
                           std::to_string(i)};
      }
    }
    ++round_trips;
  }

  // Malformed inputs must raise structured errors, never crash.
  const fs::path good = dir / "t0.csv";
  const fs::path bad_csv = dir / "bad.csv";
  const fs::path bad_meta = sidecar_path(bad_csv);
  std::ifstream meta_in(sidecar_path(good));
  const std::string good_meta((std::istreambuf_iterator<char>(meta_in)), {});

  const std::vector<std::pair<std::string, std::string>> cases = {
      {"wrong header", "x,y,z,w\n0,0,0,0\n"},
      {"ragged row", "t,c_p,c_v,y\n0,0,0,0\n0.01,0\n"},
      {"c_v domain", "t,c_p,c_v,y\n0,0,2,0\n"},
      {"non-finite", "t,c_p,c_v,y\n0,inf,0,0\n"},
      {"non-numeric", "t,c_p,c_v,y\n0,a,0,0\n"},
      {"empty body", "t,c_p,c_v,y\n"},
      {"jitter", "t,c_p,c_v,y\n0,0,0,0\n0.02,0,0,0\n0.03,0,0,0\n"},
  };
  int structured = 0;
  for (const auto& [label, body] : cases) {
    {
      std::ofstream out(bad_csv, std::ios::trunc);
      out << body;
      std::ofstream meta_out(bad_meta, std::ios::trunc);
      meta_out << good_meta;
    }
    try {
      read_trial(bad_csv);
      fs::remove_all(dir);
      return {false, "malformed case '" + label + "' was accepted"};
    } catch (const Error&) {
      ++structured;
    }
  }
  // Sidecar abuse.
  const std::vector<std::pair<std::string, std::string>> meta_cases = {
      {"not json", "nope"},
      {"bad version",
       R"({"format_version":9,"dt":0.01,"subject_id":"s","provenance":"simulated"})"},
      {"unknown key",
       R"({"format_version":1,"dt":0.01,"subject_id":"s","provenance":"simulated","zzz":0})"},
      {"bad provenance",
       R"({"format_version":1,"dt":0.01,"subject_id":"s","provenance":"psychic"})"},
  };
  for (const auto& [label, meta] : meta_cases) {
    {
      std::ofstream out(bad_csv, std::ios::trunc);
      out << "t,c_p,c_v,y\n0,0,0,0\n";
      std::ofstream meta_out(bad_meta, std::ios::trunc);
      meta_out << meta;
    }
    try {
      read_trial(bad_csv);
      fs::remove_all(dir);
      return {false, "malformed sidecar '" + label + "' was accepted"};
    } catch (const Error&) {
      ++structured;
    }
  }

  fs::remove_all(dir);
  return {true, std::to_string(round_trips) + " exact round trips; " +
                    std::to_string(structured) +
                    " malformed inputs all raised structured errors"};
}

}  // namespace

int main() {
  std::cout << "acceptance criteria\n-------------------\n";
  run("oracle-equivalence", oracle_equivalence);
  run("covariance-health", covariance_health);
  run("xi-unobservability", xi_unobservability);
  run("statistical-consistency", statistical_consistency);
  run("judgment-accuracy", judgment_accuracy);
  run("frozen-uncooperative-pattern", frozen_uncooperative_pattern);
  run("table-arithmetic-fixture", table_arithmetic_fixture);
  run("threshold-rule-check", threshold_rule_check);
  run("io-robustness", io_robustness);
  std::cout << "-------------------\n"
            << (g_failures == 0 ? "all criteria passed"
                                : std::to_string(g_failures) +
                                      " criteria failed")
            << "\n";
  return g_failures == 0 ? 0 : 1;
}
