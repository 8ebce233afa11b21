#pragma once

#include <cmath>
#include <string>

#include "hardy/error.hpp"

namespace hardy {

/// log^{(i)}(x): i-fold composition of the natural logarithm. Every
/// intermediate value must stay strictly positive.
inline double iterated_log(int i, double x) {
  if (i < 1) throw Error(ErrorCode::DomainError, "iterated_log depth must be >= 1");
  if (!(x > 0.0)) throw Error(ErrorCode::DomainError, "iterated_log argument must be positive");
  double value = x;
  for (int k = 0; k < i; ++k) {
    value = std::log(value);
    if (!(value > 0.0)) {
      throw Error(ErrorCode::DomainError,
                  "log^(" + std::to_string(k + 1) + ") is not positive at x=" + std::to_string(x));
    }
  }
  return value;
}

/// m-fold exponential tower exp(exp(...exp(1))). exp_tower(0) == 1.
inline double exp_tower(int m) {
  double value = 1.0;
  for (int k = 0; k < m; ++k) value = std::exp(value);
  return value;
}

/// X_1(t) = 1/(1 - log t), X_k = X_1(X_{k-1}); defined for t in (0, 1].
inline double x_iter(int k, double t) {
  if (k < 1) throw Error(ErrorCode::DomainError, "x_iter depth must be >= 1");
  if (!(t > 0.0 && t <= 1.0)) throw Error(ErrorCode::DomainError, "x_iter argument must lie in (0, 1]");
  double value = t;
  for (int j = 0; j < k; ++j) value = 1.0 / (1.0 - std::log(value));
  return value;
}

/// X_k evaluated from the log variable s = ln(1/t) >= 0, which stays exact
/// when t itself would underflow.
inline double x_iter_log(int k, double s) {
  if (k < 1) throw Error(ErrorCode::DomainError, "x_iter depth must be >= 1");
  if (!(s >= 0.0)) throw Error(ErrorCode::DomainError, "x_iter argument must lie in (0, 1]");
  double value = 1.0 / (1.0 + s);
  for (int j = 1; j < k; ++j) value = 1.0 / (1.0 - std::log(value));
  return value;
}

}  // namespace hardy
