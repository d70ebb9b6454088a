#pragma once

#include <array>
#include <vector>

#include "coop/records.hpp"

// Naive serial Kalman reference: plain-loop dense matrix arithmetic and its
// own assembly of the system matrices from the model constants. Kept apart
// from the Eigen implementation so equivalence tests and the benchmark compare
// two independent code paths. Test and benchmark use only.

namespace coop::ref {

using Mat = std::array<std::array<double, 4>, 4>;
using Vec = std::array<double, 4>;

struct Estimate {
  Vec mean{};
  Mat cov{};
};

struct Trace {
  std::vector<Estimate> estimates;
  std::vector<double> innovations;
  std::vector<double> innovation_vars;
};

// Full recursion over a trial, mirroring the main filter's contract
// (predict with cue_t, update with y_t, symmetrize every step).
Trace filter_trial_reference(const TrialRecord& trial,
                             const ModelParams& params, const Estimate& init,
                             bool joseph = true);

// Single predict step; exposed for the dense-matrix spot checks.
Estimate predict_reference(const Estimate& est, const ModelParams& params,
                           const CueSample& cue);

}  // namespace coop::ref
