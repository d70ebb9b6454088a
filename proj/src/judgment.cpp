#include "coop/judgment.hpp"

#include <cmath>
#include <string>

#include "coop/errors.hpp"

namespace coop {

void JudgmentConfig::validate() const {
  if (!(delay_s >= 0.0) || !std::isfinite(delay_s)) {
    throw ValidationError("JudgmentConfig: delay must be >= 0");
  }
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ValidationError("JudgmentConfig: threshold must be in (0, 1)");
  }
}

double detect_cue_onset(const CueTrace& cues) {
  if (cues.samples.empty()) {
    throw UnjudgeableError("detect_cue_onset: empty cue trace");
  }
  for (std::size_t i = 0; i < cues.samples.size(); ++i) {
    const CueSample& c = cues.samples[i];
    if (c.c_p != 0.0 || c.c_v != 0.0) return cues.times[i];
  }
  throw UnjudgeableError(
      "detect_cue_onset: no cue in trace; xi is unobservable");
}

Verdict judge(const FilterTrace& trace, const CueTrace& cues,
              const JudgmentConfig& cfg) {
  cfg.validate();
  const double onset = detect_cue_onset(cues);
  const double sample_at = onset + cfg.delay_s;

  std::size_t idx = trace.times.size();
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    if (trace.times[i] >= sample_at - 1e-12) {
      idx = i;
      break;
    }
  }
  if (idx >= trace.estimates.size()) {
    throw UnjudgeableError(
        "judge: trace ends before the sample point; needs to cover " +
        std::to_string(sample_at) + " s");
  }

  Verdict verdict;
  verdict.sampled_xi = trace.estimates[idx].mean[3];
  verdict.sample_time = trace.times[idx];
  if (verdict.sampled_xi >= cfg.threshold) {
    verdict.value = 1;
  } else if (verdict.sampled_xi <= -cfg.threshold) {
    verdict.value = -1;
  } else {
    verdict.value = 0;
  }
  return verdict;
}

}  // namespace coop
