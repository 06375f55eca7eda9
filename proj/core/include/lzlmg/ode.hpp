#pragma once

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <functional>
#include <limits>

#include "lzlmg/errors.hpp"

namespace lzlmg {

struct OdeTolerances {
  double rel = 1e-10;
  double abs = 1e-12;

  OdeTolerances halved() const { return {0.5 * rel, 0.5 * abs}; }
};

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
};

/// Embedded Runge-Kutta-Fehlberg 7(8) with error control, driven by an
/// explicit step loop so callers can land exactly on sample times, count
/// steps and get a time-stamped error when the step size collapses.
///
/// Integration may run in either time direction.
template <class State>
class AdaptiveIntegrator {
 public:
  explicit AdaptiveIntegrator(OdeTolerances tol, double initial_step = 1e-3,
                              long max_steps = 200'000'000)
      : stepper_(boost::numeric::odeint::make_controlled(
            tol.abs, tol.rel, boost::numeric::odeint::runge_kutta_fehlberg78<State>())),
        step_(std::abs(initial_step)),
        max_steps_(max_steps) {}

  /// Advances x from t to t_target. On return t == t_target exactly.
  template <class System>
  void advance(System& system, State& x, double& t, double t_target) {
    namespace odeint = boost::numeric::odeint;
    const double dir = (t_target >= t) ? 1.0 : -1.0;
    while ((t_target - t) * dir > 0.0) {
      const double remaining = std::abs(t_target - t);
      const bool clipped = step_ >= remaining;
      const double h = clipped ? remaining : step_;
      double h_try = dir * h;
      const double t_before = t;
      const auto result = stepper_.try_step(std::ref(system), x, t, h_try);
      if (result == odeint::success) {
        ++stats_.accepted;
        if (clipped) {
          t = t_target;
          step_ = std::max(step_, std::abs(h_try));
        } else {
          step_ = std::abs(h_try);
        }
      } else {
        ++stats_.rejected;
        step_ = std::abs(h_try);
        const double floor = 64.0 * std::numeric_limits<double>::epsilon() *
                             std::max(1.0, std::abs(t_before));
        if (step_ < floor) throw IntegrationError("step size underflow", t_before);
      }
      if (stats_.accepted + stats_.rejected > max_steps_)
        throw IntegrationError("step budget exhausted", t);
    }
  }

  const OdeStats& stats() const { return stats_; }

 private:
  using Controlled = decltype(boost::numeric::odeint::make_controlled(
      1.0, 1.0, boost::numeric::odeint::runge_kutta_fehlberg78<State>()));
  Controlled stepper_;
  double step_;
  long max_steps_;
  OdeStats stats_;
};

}  // namespace lzlmg
