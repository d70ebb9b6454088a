#include "coop/model.hpp"

#include <cmath>
#include <string>

namespace coop {

namespace {

bool finite(double v) { return std::isfinite(v); }

}  // namespace

void ModelParams::validate() const {
  for (auto [v, name] : {std::pair{lambda1, "lambda1"}, {k1, "k1"}, {k2, "k2"},
                         {k3, "k3"}, {k4, "k4"}, {dt, "dt"}, {q_x, "q_x"},
                         {q_eta, "q_eta"}, {q_xi, "q_xi"}, {r, "r"}}) {
    if (!finite(v)) {
      throw ValidationError(std::string("ModelParams: ") + name +
                            " must be finite");
    }
  }
  if (lambda1 < 0.0) throw ValidationError("ModelParams: lambda1 must be >= 0");
  if (k1 < 0.0) throw ValidationError("ModelParams: k1 must be >= 0");
  if (k2 < 0.0) throw ValidationError("ModelParams: k2 must be >= 0");
  if (dt <= 0.0) throw ValidationError("ModelParams: dt must be > 0");
  if (q_x < 0.0) throw ValidationError("ModelParams: q_x must be >= 0");
  if (q_eta < 0.0) throw ValidationError("ModelParams: q_eta must be >= 0");
  if (q_xi < 0.0) throw ValidationError("ModelParams: q_xi must be >= 0");
  if (r < 0.0) throw ValidationError("ModelParams: r must be >= 0");
  // Stability of the discretized free dynamics.
  if (dt * lambda1 >= 2.0) {
    throw ValidationError("ModelParams: dt*lambda1 must be < 2 (unstable)");
  }
  if (dt * dt * k1 >= 4.0) {
    throw ValidationError("ModelParams: dt^2*k1 must be < 4 (unstable)");
  }
}

bool StateVector::finite() const {
  return ::coop::finite(x) && ::coop::finite(x_dot) && ::coop::finite(eta) &&
         ::coop::finite(xi);
}

void CueSample::validate() const {
  if (!finite(c_p)) throw ValidationError("CueSample: c_p must be finite");
  if (c_v != -1.0 && c_v != 0.0 && c_v != 1.0) {
    throw ValidationError("CueSample: c_v must be one of {-1, 0, +1}");
  }
}

TransitionMatrices assemble_transition(const ModelParams& params,
                                       const CueSample& cue) {
  params.validate();
  cue.validate();
  const double dt = params.dt;

  TransitionMatrices m;
  m.a << 1.0, dt, 0.0, 0.0,                                    //
      -dt * params.k1, 1.0 - dt * params.lambda1, dt * params.k1, 0.0,  //
      0.0, 0.0, 1.0, dt * (params.k3 * cue.c_p + params.k4 * cue.c_v),  //
      0.0, 0.0, 0.0, 1.0;
  m.b << 0.0, dt * params.k2, 0.0, 0.0;
  m.h << 1.0, 0.0, 0.0, 0.0;
  m.q = Vec4{0.0, dt * params.q_x, dt * params.q_eta, dt * params.q_xi}
            .asDiagonal();
  return m;
}

StateVector step_truth(const StateVector& state, const CueSample& cue,
                       const ModelParams& params, const NoiseDraw& noise) {
  params.validate();
  cue.validate();
  if (!state.finite()) {
    throw NumericalError("step_truth: non-finite state");
  }
  const double dt = params.dt;

  StateVector next;
  next.x = state.x + dt * state.x_dot;
  next.x_dot = state.x_dot +
               dt * (-params.lambda1 * state.x_dot +
                     params.k1 * (state.eta - state.x) + params.k2 * cue.c_p) +
               noise.w_x;
  next.eta = state.eta +
             dt * state.xi * (params.k3 * cue.c_p + params.k4 * cue.c_v) +
             noise.w_eta;
  next.xi = state.xi + noise.w_xi;
  return next;
}

double measure(const StateVector& state, double noise_v) {
  return state.x + noise_v;
}

}  // namespace coop
