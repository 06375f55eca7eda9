#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lzlmg/errors.hpp"

namespace lzlmg {

struct XY {
  double x = 0.0;
  double y = 0.0;
};

struct FitWindow {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double x) const { return x >= lo && x <= hi; }
};

enum class FitModel { PowerLaw, ExponentialSaturation };

struct FitResult {
  FitModel model = FitModel::PowerLaw;
  double exponent = 0.0;  // nu for a power law, kappa for the saturation model
  double prefactor = 0.0;
  double window_lo = 0.0;  // smallest x used
  double window_hi = 0.0;  // largest x used
  double residual = 0.0;   // RMS of log(y) - log(model)
  int n_points = 0;
};

/// Least-squares line through (log x, log y) for points inside `window`:
/// y = prefactor * x^exponent.
FitResult fit_power_law(std::span<const XY> points, FitWindow window = {});

/// y = A (1 - exp(-kappa / x)), by damped Gauss-Newton (Levenberg-Marquardt)
/// with an analytic Jacobian on log-space residuals, started from the
/// two-point estimate kappa0 = -x log(1 - y) with A = 1. Requires 0 < y < 1
/// inside the window. Throws FitError with the last residual when the
/// iteration fails or the data carry no curvature to separate A from kappa.
FitResult fit_exponential_saturation(std::span<const XY> points, FitWindow window = {});

/// Minimum y in each of `bins` log-spaced bins spanning [x_lo, x_hi]. Points
/// outside the range are ignored; empty bins are skipped with a warning. The
/// returned points are the minimizing samples, ordered by x.
std::vector<XY> lower_envelope(std::span<const XY> points, int bins, double x_lo, double x_hi);

/// Binning range taken from the data.
std::vector<XY> lower_envelope(std::span<const XY> points, int bins);

struct SScalingPoint {
  int spin = 0;
  double P_ex = 0.0;
  double mandel_Q = 0.0;
};

struct SScaling {
  FitResult P_ex;
  FitResult Q;
  double ratio_exponent = 0.0;  // exponent of Q / P_ex
};

/// Power-law fits of P_ex(S) and Q(S); needs at least 3 distinct S.
SScaling scaling_with_S(std::span<const SScalingPoint> points);

/// Sum of |y[k+1] - y[k]| over points ordered by x.
double total_variation(std::span<const XY> points);

/// Largest |y[k+1] - y[k]| over points ordered by x.
double max_neighbour_jump(std::span<const XY> points);

std::string to_string(FitModel m);

}  // namespace lzlmg
