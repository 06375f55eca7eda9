#include "lzlmg/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "lzlmg/diagnostics.hpp"

namespace lzlmg {

namespace {

std::vector<XY> select_window(std::span<const XY> points, FitWindow window) {
  std::vector<XY> out;
  for (const XY& p : points)
    if (window.contains(p.x)) out.push_back(p);
  // Fits must not depend on input order.
  std::sort(out.begin(), out.end(),
            [](const XY& a, const XY& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  return out;
}

void require_points(const std::vector<XY>& pts, const char* what) {
  if (pts.size() < 3)
    throw FitError(std::string(what) + ": need at least 3 points in the window, got " +
                   std::to_string(pts.size()));
  if (pts.front().x == pts.back().x)
    throw FitError(std::string(what) + ": all points share the same x");
}

double saturation(double kappa, double x) { return -std::expm1(-kappa / x); }

double log_rms(const std::vector<XY>& pts, double logA, double kappa) {
  double ss = 0.0;
  for (const XY& p : pts) {
    const double r = std::log(p.y) - logA - std::log(saturation(kappa, p.x));
    ss += r * r;
  }
  return std::sqrt(ss / static_cast<double>(pts.size()));
}

}  // namespace

std::string to_string(FitModel m) {
  return m == FitModel::PowerLaw ? "power_law" : "exponential_saturation";
}

FitResult fit_power_law(std::span<const XY> points, FitWindow window) {
  const std::vector<XY> pts = select_window(points, window);
  require_points(pts, "power-law fit");
  for (const XY& p : pts)
    if (!(p.x > 0.0) || !(p.y > 0.0) || !std::isfinite(p.x) || !std::isfinite(p.y)) {
      std::ostringstream msg;
      msg << "power-law fit: non-positive or non-finite point (" << p.x << ", " << p.y << ")";
      throw FitError(msg.str());
    }

  const double n = static_cast<double>(pts.size());
  double mx = 0.0, my = 0.0;
  for (const XY& p : pts) {
    mx += std::log(p.x);
    my += std::log(p.y);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const XY& p : pts) {
    const double dx = std::log(p.x) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(p.y) - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss = 0.0;
  for (const XY& p : pts) {
    const double r = std::log(p.y) - intercept - slope * std::log(p.x);
    ss += r * r;
  }

  FitResult f;
  f.model = FitModel::PowerLaw;
  f.exponent = slope;
  f.prefactor = std::exp(intercept);
  f.window_lo = pts.front().x;
  f.window_hi = pts.back().x;
  f.residual = std::sqrt(ss / n);
  f.n_points = static_cast<int>(pts.size());
  return f;
}

FitResult fit_exponential_saturation(std::span<const XY> points, FitWindow window) {
  const std::vector<XY> pts = select_window(points, window);
  require_points(pts, "saturation fit");
  double ymin = pts.front().y, ymax = pts.front().y;
  for (const XY& p : pts) {
    if (!(p.x > 0.0) || !(p.y > 0.0 && p.y < 1.0) || !std::isfinite(p.x)) {
      std::ostringstream msg;
      msg << "saturation fit: point (" << p.x << ", " << p.y << ") outside x > 0, 0 < y < 1";
      throw FitError(msg.str());
    }
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  if (ymax - ymin <= 1e-9 * ymax)
    throw FitError("saturation fit: data are flat, A and kappa are underdetermined");

  // Two-point start with A = 1.
  const XY& a = pts.front();
  const XY& b = pts.back();
  double kappa = 0.5 * (-a.x * std::log1p(-a.y) - b.x * std::log1p(-b.y));
  double logA = 0.0;
  {
    double s = 0.0;
    for (const XY& p : pts) s += std::log(p.y) - std::log(saturation(kappa, p.x));
    logA = s / static_cast<double>(pts.size());
  }

  double cost = log_rms(pts, logA, kappa);
  double mu = 1e-3;
  bool converged = false;
  const double x_max = b.x;
  for (int iter = 0; iter < 500; ++iter) {
    // J^T J and J^T r for parameters (logA, kappa); r = log y - log model.
    double jaa = 0.0, jak = 0.0, jkk = 0.0, ga = 0.0, gk = 0.0;
    for (const XY& p : pts) {
      const double r = std::log(p.y) - logA - std::log(saturation(kappa, p.x));
      const double da = -1.0;
      const double dk = -1.0 / (p.x * std::expm1(kappa / p.x));
      jaa += da * da;
      jak += da * dk;
      jkk += dk * dk;
      ga += da * r;
      gk += dk * r;
    }
    bool stepped = false;
    for (int tries = 0; tries < 60 && !stepped; ++tries) {
      const double a11 = jaa * (1.0 + mu), a22 = jkk * (1.0 + mu), a12 = jak;
      const double det = a11 * a22 - a12 * a12;
      if (!(std::abs(det) > 0.0)) {
        mu *= 10.0;
        continue;
      }
      const double step_a = -(a22 * ga - a12 * gk) / det;
      const double step_k = -(a11 * gk - a12 * ga) / det;
      const double new_k = kappa + step_k;
      if (!(new_k > 0.0) || !std::isfinite(new_k)) {
        mu *= 10.0;
        continue;
      }
      const double new_cost = log_rms(pts, logA + step_a, new_k);
      if (std::isfinite(new_cost) && new_cost <= cost) {
        const double rel_change = std::abs(step_k) / (std::abs(kappa) + 1e-300) + std::abs(step_a);
        const bool small = rel_change < 1e-13 || cost - new_cost <= 1e-15 * (1.0 + cost);
        logA += step_a;
        kappa = new_k;
        cost = new_cost;
        mu = std::max(mu * 0.3, 1e-12);
        stepped = true;
        if (small) converged = true;
      } else {
        mu *= 10.0;
      }
    }
    if (!stepped) {
      // No descent direction left: at a minimum to working precision.
      converged = true;
    }
    if (kappa > 1e8 * x_max)
      throw FitError("saturation fit: kappa diverges, data carry no curvature", cost);
    if (converged) break;
  }
  if (!converged) throw FitError("saturation fit did not converge in 500 iterations", cost);

  FitResult f;
  f.model = FitModel::ExponentialSaturation;
  f.exponent = kappa;
  f.prefactor = std::exp(logA);
  f.window_lo = a.x;
  f.window_hi = b.x;
  f.residual = cost;
  f.n_points = static_cast<int>(pts.size());
  return f;
}

std::vector<XY> lower_envelope(std::span<const XY> points, int bins, double x_lo, double x_hi) {
  if (bins < 1) throw InvalidArgument("lower_envelope: bins must be >= 1");
  if (!(x_lo > 0.0) || !(x_hi > x_lo) || !std::isfinite(x_hi))
    throw InvalidArgument("lower_envelope: need 0 < x_lo < x_hi");
  const double l0 = std::log(x_lo), width = (std::log(x_hi) - l0) / bins;
  std::vector<int> best(static_cast<std::size_t>(bins), -1);
  for (std::size_t k = 0; k < points.size(); ++k) {
    const XY& p = points[k];
    if (!(p.x >= x_lo && p.x <= x_hi)) continue;
    int b = static_cast<int>(std::floor((std::log(p.x) - l0) / width));
    b = std::clamp(b, 0, bins - 1);
    int& cur = best[static_cast<std::size_t>(b)];
    if (cur < 0) {
      cur = static_cast<int>(k);
      continue;
    }
    const XY& q = points[static_cast<std::size_t>(cur)];
    if (p.y < q.y || (p.y == q.y && p.x < q.x)) cur = static_cast<int>(k);
  }
  std::vector<XY> out;
  int empty = 0;
  for (int idx : best) {
    if (idx < 0)
      ++empty;
    else
      out.push_back(points[static_cast<std::size_t>(idx)]);
  }
  if (empty > 0)
    warn("lower_envelope: " + std::to_string(empty) + " of " + std::to_string(bins) +
         " bins are empty and were skipped");
  return out;
}

std::vector<XY> lower_envelope(std::span<const XY> points, int bins) {
  if (points.size() < static_cast<std::size_t>(std::max(bins, 1)))
    throw InvalidArgument("lower_envelope: fewer points than bins");
  double lo = points.front().x, hi = points.front().x;
  for (const XY& p : points) {
    lo = std::min(lo, p.x);
    hi = std::max(hi, p.x);
  }
  return lower_envelope(points, bins, lo, hi);
}

SScaling scaling_with_S(std::span<const SScalingPoint> points) {
  std::set<int> distinct;
  for (const auto& p : points) distinct.insert(p.spin);
  if (distinct.size() < 3) throw FitError("S scaling: need at least 3 distinct S values");
  std::vector<XY> pex, q, ratio;
  for (const auto& p : points) {
    pex.push_back({static_cast<double>(p.spin), p.P_ex});
    q.push_back({static_cast<double>(p.spin), p.mandel_Q});
    ratio.push_back({static_cast<double>(p.spin), p.mandel_Q / p.P_ex});
  }
  SScaling s;
  s.P_ex = fit_power_law(pex);
  s.Q = fit_power_law(q);
  s.ratio_exponent = fit_power_law(ratio).exponent;
  return s;
}

double total_variation(std::span<const XY> points) {
  const std::vector<XY> pts = select_window(points, {});
  double tv = 0.0;
  for (std::size_t k = 1; k < pts.size(); ++k) tv += std::abs(pts[k].y - pts[k - 1].y);
  return tv;
}

double max_neighbour_jump(std::span<const XY> points) {
  const std::vector<XY> pts = select_window(points, {});
  double m = 0.0;
  for (std::size_t k = 1; k < pts.size(); ++k) m = std::max(m, std::abs(pts[k].y - pts[k - 1].y));
  return m;
}

}  // namespace lzlmg
