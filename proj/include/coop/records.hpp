#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coop/model.hpp"

// Trial data containers shared by the simulator, the filter, and the file
// layer. Every series in a record lives on the same uniform time grid; the cue
// at index i drives the transition into sample i (records begin one step after
// the initial state).

namespace coop {

enum class PhysicalIntensity { None, Soft, Hard };
enum class VerbalCue { None, Back, Forward };
enum class BehaviorMode { Model, FrozenUncooperative };
enum class Provenance { Simulated, Recorded };

// One cell of the experimental grid plus the per-trial RNG seed.
struct TrialSpec {
  int requested_xi = 0;  // in {-1, 0, +1}
  PhysicalIntensity physical = PhysicalIntensity::None;
  VerbalCue verbal = VerbalCue::None;
  // Verbal onset minus physical onset, whole seconds in [-4, 4]; meaningful
  // only when both cues are present.
  int relative_timing_s = 0;
  double duration_s = 5.0;
  std::uint64_t seed = 0;

  // All-None trials are legal but carry no information about xi.
  bool judgeable() const {
    return physical != PhysicalIntensity::None || verbal != VerbalCue::None;
  }
  void validate() const;

  bool operator==(const TrialSpec&) const = default;
};

// Cue streams on the uniform dt grid.
struct CueTrace {
  double dt = 0.0;
  std::vector<double> times;
  std::vector<CueSample> samples;

  std::size_t size() const { return samples.size(); }
};

// One trial: cues, measurements, and (for simulated data) the generating spec
// and ground-truth state series.
struct TrialRecord {
  std::optional<TrialSpec> spec;          // absent for recorded data
  CueTrace cues;
  std::optional<std::vector<StateVector>> truth;  // absent for recorded data
  std::vector<double> measurements;       // y_t, m
  std::string subject_id;
  std::optional<int> requested_xi;        // ground-truth label when known
  Provenance provenance = Provenance::Simulated;
};

const char* to_string(PhysicalIntensity v);
const char* to_string(VerbalCue v);
const char* to_string(BehaviorMode v);
const char* to_string(Provenance v);

PhysicalIntensity physical_from_string(const std::string& s);
VerbalCue verbal_from_string(const std::string& s);
BehaviorMode behavior_from_string(const std::string& s);
Provenance provenance_from_string(const std::string& s);

}  // namespace coop
