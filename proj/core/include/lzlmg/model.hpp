#pragma once

#include <cmath>
#include <string>

#include "lzlmg/errors.hpp"

namespace lzlmg {

/// Parameters shared by every engine: H(t) = lambda*t*Sz - (U/S)*Sx^2 swept
/// over [t_i, t_f].
struct ModelParams {
  int spin = 10;
  double U = 1.0;
  double lambda = 1.0;
  double t_i = -200.0;
  double t_f = 200.0;

  /// Minimal check for building operators: integer spin, finite couplings.
  /// Any sign of U is accepted here (U < 0 is the antiferromagnetic model).
  void validate_operator_params() const {
    if (spin < 1) throw InvalidArgument("spin must be a positive integer, got " + std::to_string(spin));
    if (!std::isfinite(U)) throw InvalidArgument("U must be finite");
    if (!std::isfinite(lambda)) throw InvalidArgument("lambda must be finite");
  }

  /// Check for running a sweep. U = 0 is allowed as the decoupled reference
  /// case; campaigns additionally require U > 0.
  void validate() const {
    validate_operator_params();
    if (U < 0.0) throw InvalidArgument("U must be >= 0 (ferromagnetic sweep)");
    if (!(lambda > 0.0)) throw InvalidArgument("lambda must be > 0");
    if (!std::isfinite(t_i) || !std::isfinite(t_f) || !(t_i < t_f))
      throw InvalidArgument("require finite t_i < t_f");
  }

  int dim() const { return 2 * spin + 1; }

  /// True when the sweep ends inside the critical region |lambda t / U| < 2.
  bool final_time_in_critical_region() const { return lambda * t_f < 2.0 * U; }
  bool initial_time_in_critical_region() const { return lambda * std::abs(t_i) < 2.0 * U; }
};

/// Parses a spin value that may arrive as a floating-point number; rejects
/// anything that is not a positive integer.
inline int checked_integer_spin(double s) {
  if (!std::isfinite(s) || s < 1.0 || std::floor(s) != s)
    throw InvalidArgument("spin must be a positive integer, got " + std::to_string(s));
  return static_cast<int>(s);
}

}  // namespace lzlmg
