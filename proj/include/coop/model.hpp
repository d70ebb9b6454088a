#pragma once

#include <Eigen/Dense>

#include "coop/errors.hpp"

// Three-stage cue-response model of a seated care recipient, discretized on a
// uniform grid of period dt:
//
//   x''  = -lambda1*x' + k1*(eta - x) + k2*c_p + w_x      (torso biomechanics)
//   eta+ = eta + dt*xi*(k3*c_p + k4*c_v) + w_eta          (intended position)
//   xi+  = xi + w_xi                                      (cooperativeness)
//   y    = x + v                                          (position measurement)
//
// Stacked as the time-variant linear system x_{t+1} = A(c_p,c_v) x_t + B c_p + w
// over the state [x, x', eta, xi].
//
// Unit table for the A matrix (row unit per column unit):
//
//            | x [m]        x' [m/s]     eta [m]      xi [-]
//   ---------+---------------------------------------------------------
//   x   [m]  | 1            dt [s]       0            0
//   x'  [m/s]| -dt*k1 [1/s] 1-dt*lambda1 dt*k1 [1/s]  0
//   eta [m]  | 0            0            1            dt*(k3*c_p+k4*c_v) [m]
//   xi  [-]  | 0            0            0            1
//
// Every entry is the multiplier taking its column's unit into its row's unit.
// B = [0, dt*k2, 0, 0]^T applies to the scalar physical cue c_p [N].
//
// Sign convention: forward (torso bending toward standing) is positive x,
// positive c_p, and c_v = +1.

namespace coop {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;
using RowVec4 = Eigen::RowVector4d;

// All model constants and noise levels. q_* are noise intensities; the
// discrete per-tick process noise covariance is diag(0, dt*q_x, dt*q_eta,
// dt*q_xi) (forward-Euler injection at the x'-, eta-, and xi-rows).
struct ModelParams {
  double lambda1 = 4.0;  // damping rate, 1/s
  double k1 = 9.0;       // voluntary proportional gain, 1/s^2
  double k2 = 0.01;      // mechanical compliance gain, m/(s^2*N)
  double k3 = 0.05;      // physical-cue intention gain, m/(s*N)
  double k4 = 1.0;       // verbal-cue intention gain, m/s per unit symbol
  double dt = 0.01;      // sample period, s
  double q_x = 1e-6;     // process noise intensity, x'' level
  double q_eta = 1e-7;   // process noise intensity, eta level
  double q_xi = 1e-6;    // process noise intensity, xi level
  double r = 1e-6;       // measurement noise variance, m^2

  // Throws ValidationError naming the violated invariant.
  void validate() const;

  static ModelParams defaults() { return ModelParams{}; }
};

// State of the care recipient at one tick.
struct StateVector {
  double x = 0.0;      // torso displacement, m
  double x_dot = 0.0;  // torso velocity, m/s
  double eta = 0.0;    // intended position, m
  double xi = 0.0;     // cooperativeness; ground truth in {-1,0,+1},
                       // continuous in estimation

  bool finite() const;
  Vec4 as_vector() const { return Vec4{x, x_dot, eta, xi}; }
  static StateVector from_vector(const Vec4& v) {
    return StateVector{v[0], v[1], v[2], v[3]};
  }
};

// One tick of caregiver input. c_v is a symbol: +1 "Move Forward",
// -1 "Move Back", 0 silence.
struct CueSample {
  double c_p = 0.0;  // physical cue force, N (forward positive)
  double c_v = 0.0;  // verbal cue symbol, in {-1, 0, +1}

  void validate() const;
};

// Additive process noise for one truth step (already scaled to per-tick
// standard deviations; all-zero for deterministic stepping).
struct NoiseDraw {
  double w_x = 0.0;    // velocity-row noise, m/s
  double w_eta = 0.0;  // intention-row noise, m
  double w_xi = 0.0;   // cooperativeness-row noise
};

// Discrete system matrices for one tick. Only the eta-row's xi-column of `a`
// depends on the cue; h is [1,0,0,0] always.
struct TransitionMatrices {
  Mat4 a;
  Vec4 b;
  RowVec4 h;
  Mat4 q;
};

// Builds A(c_p,c_v), B, H, Q from the model constants for one tick.
TransitionMatrices assemble_transition(const ModelParams& params,
                                       const CueSample& cue);

// Forward-Euler ground truth step. Throws NumericalError on non-finite input.
StateVector step_truth(const StateVector& state, const CueSample& cue,
                       const ModelParams& params, const NoiseDraw& noise);

// y = x + v.
double measure(const StateVector& state, double noise_v);

}  // namespace coop
