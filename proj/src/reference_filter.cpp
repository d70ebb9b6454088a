#include "coop/reference_filter.hpp"

#include <cstddef>

#include "coop/errors.hpp"

namespace coop::ref {

namespace {

Mat zero() {
  Mat m{};
  return m;
}

Mat identity() {
  Mat m = zero();
  for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
  return m;
}

Mat matmul(const Mat& a, const Mat& b) {
  Mat out = zero();
  for (int i = 0; i < 4; ++i) {
    for (int k = 0; k < 4; ++k) {
      for (int j = 0; j < 4; ++j) {
        out[i][j] += a[i][k] * b[k][j];
      }
    }
  }
  return out;
}

Mat transpose(const Mat& a) {
  Mat out = zero();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) out[i][j] = a[j][i];
  }
  return out;
}

Mat add(const Mat& a, const Mat& b) {
  Mat out = zero();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) out[i][j] = a[i][j] + b[i][j];
  }
  return out;
}

Vec matvec(const Mat& a, const Vec& v) {
  Vec out{};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) out[i] += a[i][j] * v[j];
  }
  return out;
}

Mat symmetrize(const Mat& a) {
  Mat out = zero();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) out[i][j] = 0.5 * (a[i][j] + a[j][i]);
  }
  return out;
}

// System matrices built directly from the difference equations.
void build_system(const ModelParams& p, const CueSample& cue, Mat& a, Vec& b,
                  Vec& h, Mat& q) {
  a = zero();
  a[0][0] = 1.0;
  a[0][1] = p.dt;
  a[1][0] = -p.dt * p.k1;
  a[1][1] = 1.0 - p.dt * p.lambda1;
  a[1][2] = p.dt * p.k1;
  a[2][2] = 1.0;
  a[2][3] = p.dt * (p.k3 * cue.c_p + p.k4 * cue.c_v);
  a[3][3] = 1.0;

  b = Vec{0.0, p.dt * p.k2, 0.0, 0.0};
  h = Vec{1.0, 0.0, 0.0, 0.0};

  q = zero();
  q[1][1] = p.dt * p.q_x;
  q[2][2] = p.dt * p.q_eta;
  q[3][3] = p.dt * p.q_xi;
}

}  // namespace

Estimate predict_reference(const Estimate& est, const ModelParams& params,
                           const CueSample& cue) {
  Mat a, q;
  Vec b, h;
  build_system(params, cue, a, b, h, q);

  Estimate out;
  out.mean = matvec(a, est.mean);
  for (int i = 0; i < 4; ++i) out.mean[i] += b[i] * cue.c_p;
  out.cov = symmetrize(add(matmul(matmul(a, est.cov), transpose(a)), q));
  return out;
}

Trace filter_trial_reference(const TrialRecord& trial,
                             const ModelParams& params, const Estimate& init,
                             bool joseph) {
  const std::size_t n = trial.measurements.size();
  if (trial.cues.size() != n) {
    throw ValidationError("filter_trial_reference: series lengths differ");
  }

  Trace trace;
  trace.estimates.reserve(n);
  trace.innovations.reserve(n);
  trace.innovation_vars.reserve(n);

  Estimate est = init;
  for (std::size_t t = 0; t < n; ++t) {
    const CueSample& cue = trial.cues.samples[t];
    est = predict_reference(est, params, cue);

    // Scalar measurement update on the x component (h = e0).
    const double y = trial.measurements[t];
    const double innovation = y - est.mean[0];
    const double s = est.cov[0][0] + params.r;
    if (!(s > 0.0)) {
      throw NumericalError("filter_trial_reference: non-positive innovation "
                           "variance");
    }
    Vec gain{};
    for (int i = 0; i < 4; ++i) gain[i] = est.cov[i][0] / s;

    Estimate post;
    for (int i = 0; i < 4; ++i) post.mean[i] = est.mean[i] + gain[i] * innovation;
    if (joseph) {
      Mat ikh = identity();
      for (int i = 0; i < 4; ++i) ikh[i][0] -= gain[i];
      Mat jp = matmul(matmul(ikh, est.cov), transpose(ikh));
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) jp[i][j] += gain[i] * params.r * gain[j];
      }
      post.cov = symmetrize(jp);
    } else {
      Mat ikh = identity();
      for (int i = 0; i < 4; ++i) ikh[i][0] -= gain[i];
      post.cov = symmetrize(matmul(ikh, est.cov));
    }

    est = post;
    trace.estimates.push_back(est);
    trace.innovations.push_back(innovation);
    trace.innovation_vars.push_back(s);
  }
  return trace;
}

}  // namespace coop::ref
