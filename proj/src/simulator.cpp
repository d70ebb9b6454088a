#include "coop/simulator.hpp"

#include <cmath>
#include <random>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "coop/errors.hpp"

namespace coop {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

long tick_of(double t, double dt) { return std::lround(t / dt); }

}  // namespace

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = master;
  std::uint64_t out = splitmix64(s);
  s ^= a * 0xD1B54A32D192ED03ULL;
  out ^= splitmix64(s);
  s ^= b * 0x9E6C63D0876A9A47ULL;
  out ^= splitmix64(s);
  return out;
}

CueTrace generate_cue_schedule(const TrialSpec& spec, const ModelParams& params,
                               const CueShape& shape) {
  spec.validate();
  params.validate();
  const double dt = params.dt;
  const long n = tick_of(spec.duration_s, dt);
  if (n < 1) {
    throw ValidationError("generate_cue_schedule: duration shorter than dt");
  }

  CueTrace trace;
  trace.dt = dt;
  trace.times.resize(static_cast<std::size_t>(n));
  trace.samples.assign(static_cast<std::size_t>(n), CueSample{});
  for (long i = 0; i < n; ++i) {
    trace.times[static_cast<std::size_t>(i)] = static_cast<double>(i) * dt;
  }

  const bool has_physical = spec.physical != PhysicalIntensity::None;
  const bool has_verbal = spec.verbal != VerbalCue::None;

  if (has_physical) {
    const double amp =
        spec.physical == PhysicalIntensity::Hard ? shape.hard_n : shape.soft_n;
    const long on = tick_of(shape.onset_s, dt);
    if (on < 0 || on >= n) {
      throw ValidationError(
          "generate_cue_schedule: physical pulse placed outside the trial "
          "duration");
    }
    const long off = std::min(n, tick_of(shape.onset_s + shape.pulse_s, dt));
    for (long i = on; i < off; ++i) {
      trace.samples[static_cast<std::size_t>(i)].c_p = amp;
    }
  }

  if (has_verbal) {
    double t_verbal = has_physical
                          ? shape.onset_s + static_cast<double>(spec.relative_timing_s)
                          : shape.onset_s;
    if (!has_physical && tick_of(t_verbal, dt) >= n) {
      throw ValidationError(
          "generate_cue_schedule: verbal cue placed outside the trial "
          "duration");
    }
    // Both-cue placements are clamped into the trial window.
    long iv = tick_of(t_verbal, dt);
    iv = std::max(0L, std::min(n - 1, iv));
    trace.samples[static_cast<std::size_t>(iv)].c_v =
        spec.verbal == VerbalCue::Forward ? 1.0 : -1.0;
  }

  return trace;
}

TrialRecord simulate_trial(const TrialSpec& spec, const ModelParams& params,
                           BehaviorMode behavior, bool hold_xi) {
  CueTrace cues = generate_cue_schedule(spec, params);
  const std::size_t n = cues.size();
  const double dt = params.dt;

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double sd_x = std::sqrt(dt * params.q_x);
  const double sd_eta = std::sqrt(dt * params.q_eta);
  const double sd_xi = std::sqrt(dt * params.q_xi);
  const double sd_v = std::sqrt(params.r);

  const bool frozen = behavior == BehaviorMode::FrozenUncooperative &&
                      spec.requested_xi == -1;

  TrialRecord record;
  record.spec = spec;
  record.cues = cues;
  record.subject_id = "sim";
  record.requested_xi = spec.requested_xi;
  record.provenance = Provenance::Simulated;
  record.truth.emplace();
  record.truth->reserve(n);
  record.measurements.reserve(n);

  StateVector state{0.0, 0.0, 0.0, static_cast<double>(spec.requested_xi)};
  for (std::size_t i = 0; i < n; ++i) {
    // Fixed draw order per tick keeps trials bit-reproducible; the xi draw is
    // consumed even when held so the stream stays aligned across modes.
    const double g_x = gauss(rng);
    const double g_eta = gauss(rng);
    const double g_xi = gauss(rng);
    const double g_v = gauss(rng);
    NoiseDraw noise;
    noise.w_x = g_x * sd_x;
    noise.w_eta = g_eta * sd_eta;
    noise.w_xi = hold_xi ? 0.0 : g_xi * sd_xi;
    const double v = g_v * sd_v;

    CueSample effective = cues.samples[i];
    if (frozen) effective.c_v = 0.0;  // verbal cues are ignored, not resisted
    state = step_truth(state, effective, params, noise);
    record.truth->push_back(state);
    record.measurements.push_back(measure(state, v));
  }
  return record;
}

std::vector<TrialSpec> generate_trial_suite(int n_subjects,
                                            int trials_per_subject,
                                            std::uint64_t master_seed) {
  if (n_subjects < 1 || trials_per_subject < 1) {
    throw ValidationError("generate_trial_suite: counts must be >= 1");
  }

  std::mt19937_64 rng(master_seed);
  std::uniform_int_distribution<int> pick3(0, 2);
  std::uniform_int_distribution<int> pick_timing(-4, 4);
  const int xi_values[3] = {-1, 0, 1};
  const PhysicalIntensity phys_values[3] = {
      PhysicalIntensity::None, PhysicalIntensity::Soft, PhysicalIntensity::Hard};
  const VerbalCue verb_values[3] = {VerbalCue::None, VerbalCue::Back,
                                    VerbalCue::Forward};

  std::vector<TrialSpec> base;
  base.reserve(static_cast<std::size_t>(trials_per_subject));
  for (int i = 0; i < trials_per_subject; ++i) {
    TrialSpec spec;
    spec.requested_xi = xi_values[pick3(rng)];
    spec.physical = phys_values[pick3(rng)];
    spec.verbal = verb_values[pick3(rng)];
    spec.relative_timing_s = pick_timing(rng);
    spec.duration_s = 5.0;
    base.push_back(spec);
  }

  // The same trial parameters repeat for every subject; only the noise
  // realization (per-trial seed) differs.
  std::vector<TrialSpec> suite;
  suite.reserve(static_cast<std::size_t>(n_subjects * trials_per_subject));
  for (int j = 0; j < n_subjects; ++j) {
    for (int i = 0; i < trials_per_subject; ++i) {
      TrialSpec spec = base[static_cast<std::size_t>(i)];
      spec.seed = mix_seed(master_seed, static_cast<std::uint64_t>(j),
                           static_cast<std::uint64_t>(i));
      suite.push_back(spec);
    }
  }
  return suite;
}

std::string suite_subject_id(int subject_index) {
  return "subject-" + std::to_string(subject_index + 1);
}

std::vector<TrialRecord> simulate_suite(const std::vector<TrialSpec>& specs,
                                        int trials_per_subject,
                                        const ModelParams& params,
                                        BehaviorMode behavior, bool hold_xi,
                                        int threads) {
  if (trials_per_subject < 1) {
    throw ValidationError("simulate_suite: trials_per_subject must be >= 1");
  }
  std::vector<TrialRecord> records(specs.size());
  const long n = static_cast<long>(specs.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads > 0 ? threads : omp_get_max_threads())
#endif
  for (long k = 0; k < n; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    records[idx] = simulate_trial(specs[idx], params, behavior, hold_xi);
    records[idx].subject_id =
        suite_subject_id(static_cast<int>(k / trials_per_subject));
  }
  return records;
}

}  // namespace coop
