#include "coop/records.hpp"

#include <cmath>

#include "coop/errors.hpp"

namespace coop {

void TrialSpec::validate() const {
  if (requested_xi != -1 && requested_xi != 0 && requested_xi != 1) {
    throw ValidationError("TrialSpec: requested_xi must be one of {-1, 0, +1}");
  }
  if (relative_timing_s < -4 || relative_timing_s > 4) {
    throw ValidationError("TrialSpec: relative_timing_s must be in [-4, 4]");
  }
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
    throw ValidationError("TrialSpec: duration_s must be positive and finite");
  }
}

const char* to_string(PhysicalIntensity v) {
  switch (v) {
    case PhysicalIntensity::None: return "none";
    case PhysicalIntensity::Soft: return "soft";
    case PhysicalIntensity::Hard: return "hard";
  }
  return "none";
}

const char* to_string(VerbalCue v) {
  switch (v) {
    case VerbalCue::None: return "none";
    case VerbalCue::Back: return "back";
    case VerbalCue::Forward: return "forward";
  }
  return "none";
}

const char* to_string(BehaviorMode v) {
  return v == BehaviorMode::Model ? "model" : "frozen-uncooperative";
}

const char* to_string(Provenance v) {
  return v == Provenance::Simulated ? "simulated" : "recorded";
}

PhysicalIntensity physical_from_string(const std::string& s) {
  if (s == "none") return PhysicalIntensity::None;
  if (s == "soft") return PhysicalIntensity::Soft;
  if (s == "hard") return PhysicalIntensity::Hard;
  throw ValidationError("unknown physical intensity '" + s + "'");
}

VerbalCue verbal_from_string(const std::string& s) {
  if (s == "none") return VerbalCue::None;
  if (s == "back") return VerbalCue::Back;
  if (s == "forward") return VerbalCue::Forward;
  throw ValidationError("unknown verbal cue '" + s + "'");
}

BehaviorMode behavior_from_string(const std::string& s) {
  if (s == "model") return BehaviorMode::Model;
  if (s == "frozen-uncooperative") return BehaviorMode::FrozenUncooperative;
  throw ValidationError("unknown behavior mode '" + s + "'");
}

Provenance provenance_from_string(const std::string& s) {
  if (s == "simulated") return Provenance::Simulated;
  if (s == "recorded") return Provenance::Recorded;
  throw ValidationError("unknown provenance '" + s + "'");
}

}  // namespace coop
