#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "bignn/matrix.hpp"

namespace bignn {

// Central-difference gradient verification.
//
// `loss` evaluates the scalar under test from the current contents of
// `inputs` (rebuilding its tape from scratch each call); `analytic` holds the
// tape gradients for the same inputs. Returns the scaled infinity-norm
// relative error max|a - n| / max(1, |a|, |n|).
inline double finite_diff_max_rel_err(std::vector<Matrix*> inputs,
                                      const std::vector<Matrix>& analytic,
                                      const std::function<double()>& loss,
                                      double h = 1e-5) {
  double worst = 0.0;
  for (std::size_t p = 0; p < inputs.size(); ++p) {
    Matrix& x = *inputs[p];
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double keep = x[i];
      x[i] = keep + h;
      const double up = loss();
      x[i] = keep - h;
      const double dn = loss();
      x[i] = keep;
      const double numeric = (up - dn) / (2.0 * h);
      const double a = analytic[p][i];
      const double denom = std::max({1.0, std::fabs(a), std::fabs(numeric)});
      worst = std::max(worst, std::fabs(a - numeric) / denom);
    }
  }
  return worst;
}

}  // namespace bignn
