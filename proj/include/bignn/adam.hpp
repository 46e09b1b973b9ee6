#pragma once

#include <cmath>
#include <cstdint>

#include "bignn/matrix.hpp"

namespace bignn {

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Per-parameter moment state. t counts completed steps.
struct AdamState {
  Matrix m;
  Matrix v;
  std::int64_t t = 0;

  explicit AdamState(std::size_t rows = 0, std::size_t cols = 0)
      : m(rows, cols), v(rows, cols) {}
};

// One bias-corrected Adam update:
//   m' = b1 m + (1-b1) g,  v' = b2 v + (1-b2) g^2
//   p -= lr * (m'/(1-b1^t)) / (sqrt(v'/(1-b2^t)) + eps)
inline void adam_step(Matrix& param, const Matrix& grad, AdamState& state,
                      const AdamConfig& cfg) {
  check_same_shape(param, grad, "adam_step");
  if (state.m.size() == 0) {
    state.m = Matrix::zeros(param.rows(), param.cols());
    state.v = Matrix::zeros(param.rows(), param.cols());
  }
  check_same_shape(param, state.m, "adam_step (state)");
  state.t += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < param.size(); ++i) {
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grad[i];
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    param[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.epsilon);
  }
}

}  // namespace bignn
