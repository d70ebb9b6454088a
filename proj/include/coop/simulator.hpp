#pragma once

#include <cstdint>
#include <vector>

#include "coop/records.hpp"

// Synthetic ground-truth trials: cue schedules drawn from the experimental
// grid and care-recipient responses stepped through the model. All generation
// is seed-driven and deterministic; distinct trials carry independent RNG
// streams and may be simulated in parallel.

namespace coop {

// Cue waveform constants. The grid labels Soft/Hard map to rectangular force
// pulses; the verbal cue is a one-tick +/-1 symbol impulse.
struct CueShape {
  double soft_n = 8.0;       // Soft pulse amplitude, N
  double hard_n = 20.0;      // Hard pulse amplitude, N
  double pulse_s = 0.5;      // physical pulse length, s
  double onset_s = 0.5;      // nominal onset of the first-placed cue, s
};

// Rasterizes the spec's cues onto the dt grid. The physical pulse covers
// [onset, onset+pulse); the verbal tick lands at physical onset +
// relative_timing when both cues are present (clamped into the trial window),
// at the nominal onset otherwise.
CueTrace generate_cue_schedule(const TrialSpec& spec, const ModelParams& params,
                               const CueShape& shape = {});

// Simulates one trial: seeds an RNG from spec.seed, starts the truth at
// (0, 0, 0, requested_xi), steps the model with the configured process noise,
// and measures with variance r. With hold_xi (default) the xi-row noise is
// zeroed so the requested cooperativeness is the per-trial ground truth.
//
// FrozenUncooperative mode makes xi = -1 subjects ignore verbal cues (their
// intention does not respond) while still resisting physical cues; other
// requested states behave as in Model mode.
TrialRecord simulate_trial(const TrialSpec& spec, const ModelParams& params,
                           BehaviorMode behavior = BehaviorMode::Model,
                           bool hold_xi = true);

// Draws trials_per_subject specs uniformly over the grid, then replicates the
// identical spec list across n_subjects with distinct per-trial seeds.
std::vector<TrialSpec> generate_trial_suite(int n_subjects,
                                            int trials_per_subject,
                                            std::uint64_t master_seed);

// Subject label for suite position i (i / trials_per_subject).
std::string suite_subject_id(int subject_index);

// Simulates every spec of a suite (OpenMP fan-out across trials; results do
// not depend on the thread count). threads = 0 uses the OpenMP default.
std::vector<TrialRecord> simulate_suite(const std::vector<TrialSpec>& specs,
                                        int trials_per_subject,
                                        const ModelParams& params,
                                        BehaviorMode behavior,
                                        bool hold_xi = true, int threads = 0);

// splitmix64-style stream derivation for per-trial seeds.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b);

}  // namespace coop
