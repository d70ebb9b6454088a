#include "coop/kalman.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "coop/errors.hpp"

namespace coop {

namespace {

Mat4 symmetrized(const Mat4& m) { return 0.5 * (m + m.transpose()); }

void require_finite(const StateEstimate& est, const char* where, long tick) {
  if (!est.mean.allFinite() || !est.cov.allFinite()) {
    throw NumericalError(std::string(where) + ": non-finite estimate at tick " +
                         std::to_string(tick));
  }
}

}  // namespace

void StateEstimate::validate_health() const {
  const double scale = cov.cwiseAbs().maxCoeff();
  const double asym = (cov - cov.transpose()).cwiseAbs().maxCoeff();
  if (scale > 0.0 && asym > 1e-12 * scale) {
    throw NumericalError("StateEstimate: covariance asymmetry " +
                         std::to_string(asym / scale));
  }
  Eigen::SelfAdjointEigenSolver<Mat4> eig(cov, Eigen::EigenvaluesOnly);
  const double min_eig = eig.eigenvalues().minCoeff();
  if (min_eig < -1e-9 * cov.trace()) {
    throw NumericalError("StateEstimate: covariance not PSD, min eigenvalue " +
                         std::to_string(min_eig));
  }
}

StateEstimate predict(const StateEstimate& est, const TransitionMatrices& mats,
                      double c_p) {
  StateEstimate out;
  out.mean = mats.a * est.mean + mats.b * c_p;
  out.cov = symmetrized(mats.a * est.cov * mats.a.transpose() + mats.q);
  return out;
}

std::tuple<StateEstimate, double, double> update(const StateEstimate& prior,
                                                 double y, const RowVec4& h,
                                                 double r,
                                                 CovarianceForm form) {
  const double innovation = y - h * prior.mean;
  const double s = h * prior.cov * h.transpose() + r;
  if (!(s > 0.0)) {
    throw NumericalError("update: innovation variance " + std::to_string(s) +
                         " is not positive");
  }
  const Vec4 gain = prior.cov * h.transpose() / s;

  StateEstimate post;
  post.mean = prior.mean + gain * innovation;
  if (form == CovarianceForm::Joseph) {
    const Mat4 ikh = Mat4::Identity() - gain * h;
    post.cov = symmetrized(ikh * prior.cov * ikh.transpose() +
                           gain * r * gain.transpose());
  } else {
    post.cov = symmetrized((Mat4::Identity() - gain * h) * prior.cov);
  }
  return {post, innovation, s};
}

StateEstimate default_initial_estimate(double first_measurement) {
  StateEstimate init;
  init.mean = Vec4{first_measurement, 0.0, first_measurement, 0.0};
  init.cov = Vec4{1e-4, 1e-2, 1e-2, 1.0}.asDiagonal();
  return init;
}

FilterTrace filter_trial(const TrialRecord& trial, const ModelParams& params,
                         const StateEstimate& init, CovarianceForm form) {
  params.validate();
  if (!(params.r > 0.0)) {
    throw ValidationError("filter_trial: r must be > 0 before filtering");
  }
  const std::size_t n = trial.measurements.size();
  if (trial.cues.size() != n || trial.cues.times.size() != n) {
    throw ValidationError(
        "filter_trial: cue and measurement series lengths differ (" +
        std::to_string(trial.cues.size()) + " vs " + std::to_string(n) + ")");
  }
  if (n == 0) throw ValidationError("filter_trial: empty trial");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(trial.measurements[i])) {
      throw ValidationError("filter_trial: non-finite measurement at tick " +
                            std::to_string(i));
    }
    const double expected = trial.cues.times[0] +
                            static_cast<double>(i) * params.dt;
    if (std::abs(trial.cues.times[i] - expected) > 1e-6) {
      throw ValidationError("filter_trial: non-uniform time base at tick " +
                            std::to_string(i));
    }
  }

  FilterTrace trace;
  trace.times = trial.cues.times;
  trace.estimates.reserve(n);
  trace.innovations.reserve(n);
  trace.innovation_vars.reserve(n);

  StateEstimate est = init;
  for (std::size_t i = 0; i < n; ++i) {
    const CueSample& cue = trial.cues.samples[i];
    const TransitionMatrices mats = assemble_transition(params, cue);
    est = predict(est, mats, cue.c_p);
    require_finite(est, "filter_trial/predict", static_cast<long>(i));
    auto [post, z, s] = update(est, trial.measurements[i], mats.h, params.r,
                               form);
    require_finite(post, "filter_trial/update", static_cast<long>(i));
    est = post;
    trace.estimates.push_back(est);
    trace.innovations.push_back(z);
    trace.innovation_vars.push_back(s);
  }
  return trace;
}

FilterTrace filter_trial(const TrialRecord& trial, const ModelParams& params,
                         CovarianceForm form) {
  if (trial.measurements.empty()) {
    throw ValidationError("filter_trial: empty trial");
  }
  return filter_trial(trial, params,
                      default_initial_estimate(trial.measurements.front()),
                      form);
}

}  // namespace coop
