#pragma once

#include <random>
#include <vector>

#include "coop/kalman.hpp"
#include "coop/records.hpp"
#include "coop/simulator.hpp"

// Shared helpers for the unit and acceptance suites.

namespace coop::testsupport {

// Uniform draw over the experimental grid, rerolled until at least one cue is
// present.
inline TrialSpec random_judgeable_spec(std::mt19937_64& rng,
                                       double duration_s = 5.0) {
  std::uniform_int_distribution<int> pick3(0, 2);
  std::uniform_int_distribution<int> timing(-4, 4);
  TrialSpec spec;
  do {
    spec.requested_xi = pick3(rng) - 1;
    spec.physical = static_cast<PhysicalIntensity>(pick3(rng));
    spec.verbal = static_cast<VerbalCue>(pick3(rng));
  } while (!spec.judgeable());
  spec.relative_timing_s = timing(rng);
  spec.duration_s = duration_s;
  spec.seed = rng();
  return spec;
}

// A trace whose xi-mean follows `xi_values`; everything else is inert.
inline FilterTrace synthetic_xi_trace(const std::vector<double>& times,
                                      const std::vector<double>& xi_values) {
  FilterTrace trace;
  trace.times = times;
  for (std::size_t i = 0; i < times.size(); ++i) {
    StateEstimate est;
    est.mean = Vec4{0.0, 0.0, 0.0, xi_values[i]};
    est.cov = Vec4{1e-4, 1e-2, 1e-2, 0.5}.asDiagonal();
    trace.estimates.push_back(est);
    trace.innovations.push_back(0.0);
    trace.innovation_vars.push_back(1.0);
  }
  return trace;
}

// Minimal cue trace: zeros except a verbal +1 tick at `onset_s`.
inline CueTrace cue_impulse_at(double onset_s, double dt, std::size_t n) {
  CueTrace cues;
  cues.dt = dt;
  for (std::size_t i = 0; i < n; ++i) {
    cues.times.push_back(static_cast<double>(i) * dt);
    cues.samples.push_back(CueSample{});
  }
  const auto idx = static_cast<std::size_t>(std::lround(onset_s / dt));
  if (idx < n) cues.samples[idx].c_v = 1.0;
  return cues;
}

}  // namespace coop::testsupport
