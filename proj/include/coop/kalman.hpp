#pragma once

#include <tuple>
#include <vector>

#include "coop/model.hpp"
#include "coop/records.hpp"

// Standard Kalman recursion over the time-variant (A(c_p,c_v), B, H) system
// from model.hpp. The covariance is symmetrized after every step; the Joseph
// update form is the default (simple form selectable).

namespace coop {

enum class CovarianceForm { Joseph, Simple };

// Gaussian belief over the 4-state [x, x', eta, xi].
struct StateEstimate {
  Vec4 mean = Vec4::Zero();
  Mat4 cov = Mat4::Zero();

  // Symmetry (rel. tol 1e-12) and PSD-ness (min eigenvalue >= -1e-9*trace).
  // Throws NumericalError when violated; used by tests and the acceptance
  // suite at every tick.
  void validate_health() const;
};

// Per-tick diagnostic record of one filtered trial. All sequences have the
// same length as the measurement series.
struct FilterTrace {
  std::vector<double> times;
  std::vector<StateEstimate> estimates;
  std::vector<double> innovations;
  std::vector<double> innovation_vars;
};

// Time update: mean <- a*mean + b*c_p, cov <- a*cov*a' + q (symmetrized).
StateEstimate predict(const StateEstimate& est, const TransitionMatrices& mats,
                      double c_p);

// Measurement update with the scalar observation y. Returns the posterior,
// the innovation z = y - h*mean, and its variance s = h*cov*h' + r.
// Throws NumericalError when s <= 0.
std::tuple<StateEstimate, double, double> update(
    const StateEstimate& prior, double y, const RowVec4& h, double r,
    CovarianceForm form = CovarianceForm::Joseph);

// Default pre-trial belief: position and intention pinned to the first
// measurement, zero velocity, xi centered at 0 with unit variance (spanning
// the full {-1,+1} range).
StateEstimate default_initial_estimate(double first_measurement);

// Runs assemble -> predict -> update for every tick of the trial. Cues are
// known inputs; `init` describes the state one step before the first sample.
FilterTrace filter_trial(const TrialRecord& trial, const ModelParams& params,
                         const StateEstimate& init,
                         CovarianceForm form = CovarianceForm::Joseph);

// Same, with init built from the first measurement.
FilterTrace filter_trial(const TrialRecord& trial, const ModelParams& params,
                         CovarianceForm form = CovarianceForm::Joseph);

}  // namespace coop
