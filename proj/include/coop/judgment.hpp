#pragma once

#include "coop/kalman.hpp"
#include "coop/records.hpp"

// Delay-and-threshold rule mapping the continuous xi estimate to a discrete
// cooperativeness verdict: sample xi_hat at a fixed delay after cue onset and
// compare it to a symmetric dead band.

namespace coop {

struct JudgmentConfig {
  double delay_s = 0.75;    // seconds after cue onset at which xi_hat is read
  double threshold = 0.3;   // dead-band half-width, in (0, 1)

  void validate() const;
};

struct Verdict {
  int value = 0;            // in {-1, 0, +1}
  double sampled_xi = 0.0;  // the xi_hat value the rule used
  double sample_time = 0.0; // seconds
};

// Time of the first tick with a nonzero cue of either kind. Throws
// UnjudgeableError when the trace carries no cue at all.
double detect_cue_onset(const CueTrace& cues);

// Samples xi_hat at the first tick with time >= onset + delay (nearest tick
// at-or-after; no interpolation) and thresholds it. Boundary values are
// inclusive: xi_hat >= threshold -> +1, xi_hat <= -threshold -> -1, else 0.
// Throws UnjudgeableError when the trace ends before the sample point.
Verdict judge(const FilterTrace& trace, const CueTrace& cues,
              const JudgmentConfig& cfg);

}  // namespace coop
