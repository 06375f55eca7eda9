#include "lzlmg/meanfield.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "lzlmg/parallel.hpp"

namespace lzlmg {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double wrap_angle(double phi) {
  double w = std::fmod(phi, two_pi);
  if (w < 0.0) w += two_pi;
  if (w >= two_pi) w = 0.0;
  return w;
}

// (theta, phi, accumulated dE/dt)
using State = std::array<double, 3>;

}  // namespace

BlochState BlochState::from_z(double z, double phi) {
  if (!(z >= -1.0 && z <= 1.0)) throw InvalidArgument("z must lie in [-1, 1]");
  return BlochState{std::acos(z), wrap_angle(phi)};
}

double BlochState::z() const { return std::cos(theta); }

BlochState BlochState::wrapped() const { return BlochState{theta, wrap_angle(phi)}; }

double classical_energy(const ModelParams& p, const BlochState& s, double t) {
  const double sin_t = std::sin(s.theta), cos_p = std::cos(s.phi);
  return p.lambda * t * std::cos(s.theta) - p.U * sin_t * sin_t * cos_p * cos_p;
}

TrajectoryRecord integrate_meanfield_between(const ModelParams& p, const BlochState& initial,
                                             double t_start, double t_end,
                                             const MeanFieldOptions& opts) {
  p.validate_operator_params();
  if (!std::isfinite(t_start) || !std::isfinite(t_end) || t_start == t_end)
    throw InvalidArgument("integration interval must be finite and non-empty");
  if (!(opts.sample_dt > 0.0)) throw InvalidArgument("sample_dt must be > 0");
  if (!(initial.theta >= 0.0 && initial.theta <= std::numbers::pi))
    throw InvalidArgument("theta must lie in [0, pi]");

  const double lambda = p.lambda, U = p.U;
  auto rhs = [lambda, U](const State& x, State& dx, double t) {
    const double st = std::sin(x[0]), ct = std::cos(x[0]);
    const double s2p = std::sin(2.0 * x[1]), cp = std::cos(x[1]);
    dx[0] = U * st * st * s2p;
    dx[1] = lambda * t * st + 2.0 * U * st * ct * cp * cp;
    dx[2] = lambda * ct;  // partial dE/dt of the per-spin energy
  };

  const double dir = (t_end > t_start) ? 1.0 : -1.0;
  const double span = std::abs(t_end - t_start);
  const long n_samples = static_cast<long>(std::ceil(span / opts.sample_dt - 1e-9));
  auto sample_time = [&](long k) {
    return k >= n_samples ? t_end : t_start + dir * static_cast<double>(k) * opts.sample_dt;
  };
  auto recorded = [&](double t) { return dir < 0.0 || t >= opts.record_from - 1e-12; };

  TrajectoryRecord rec;
  State x = {initial.theta, initial.phi, 0.0};
  double t = t_start;
  auto record = [&] {
    const BlochState s{x[0], x[1]};
    rec.t.push_back(t);
    rec.states.push_back(s.wrapped());
    rec.phi_unwrapped.push_back(x[1]);
    rec.energy.push_back(classical_energy(p, s, t));
  };

  const double first_step = std::min(1e-2, 0.1 / (std::abs(lambda * t_start) + U + 1.0));
  AdaptiveIntegrator<State> integrator(opts.tol, first_step);
  const double e_start = classical_energy(p, initial, t_start);
  for (long k = 0; k <= n_samples; ++k) {
    const double tk = sample_time(k);
    if (!recorded(tk) && k < n_samples) continue;
    integrator.advance(rhs, x, t, tk);
    if (recorded(tk)) record();
  }
  rec.n_steps = integrator.stats().accepted;
  rec.n_rejected = integrator.stats().rejected;
  const double e_end = classical_energy(p, BlochState{x[0], x[1]}, t_end);
  rec.energy_drift_diag = std::abs(e_end - e_start - x[2]);
  return rec;
}

TrajectoryRecord integrate_meanfield(const ModelParams& p, const BlochState& initial,
                                     const MeanFieldOptions& opts) {
  p.validate();
  return integrate_meanfield_between(p, initial, p.t_i, p.t_f, opts);
}

double final_imbalance(const TrajectoryRecord& traj, double window) {
  if (!(window > 0.0)) throw InvalidArgument("averaging window must be > 0");
  if (traj.t.size() < 2) throw InvalidArgument("trajectory has fewer than two samples");
  const double t_end = traj.t.back();
  const double t_lo = t_end - window;
  if (traj.t.front() > t_lo + 1e-9)
    throw InvalidArgument("averaging window is longer than the recorded trajectory");
  double integral = 0.0;
  for (std::size_t k = 1; k < traj.t.size(); ++k) {
    const double a = traj.t[k - 1], b = traj.t[k];
    if (b <= t_lo) continue;
    double za = traj.states[k - 1].z();
    const double zb = traj.states[k].z();
    double left = a;
    if (a < t_lo) {
      za = za + (zb - za) * (t_lo - a) / (b - a);
      left = t_lo;
    }
    integral += 0.5 * (za + zb) * (b - left);
  }
  return integral / window;
}

std::vector<MeanFieldPoint> meanfield_sweep(const ModelParams& p, const BlochState& initial,
                                            std::span<const double> lambdas,
                                            const MeanFieldOptions& opts, double window,
                                            int workers) {
  std::vector<MeanFieldPoint> out(lambdas.size());
  parallel_for(lambdas.size(), workers, [&](std::size_t i) {
    ModelParams q = p;
    q.lambda = lambdas[i];
    MeanFieldOptions o = opts;
    o.record_from = q.t_f - window;
    const TrajectoryRecord rec = integrate_meanfield(q, initial, o);
    out[i] = MeanFieldPoint{q.lambda, final_imbalance(rec, window), rec.n_steps,
                            rec.energy_drift_diag};
  });
  return out;
}

FixedPointSet fixed_points(const ModelParams& p, double t) {
  p.validate_operator_params();
  const double lt = p.lambda * t, U = p.U;
  FixedPointSet set;
  set.t = t;
  // Local chart at a pole: H/S ~ +-lt (1 - r^2/2) - U x^2, Hessian
  // diag(-+lt - 2U, -+lt); determinant lt (lt +- 2U).
  const double det_north = lt * (lt + 2.0 * U);
  const double det_south = lt * (lt - 2.0 * U);
  set.points.push_back({0.0, 0.0, det_north > 0.0 ? FixedPointKind::Elliptic : FixedPointKind::Hyperbolic,
                        p.spin * lt});
  set.points.push_back({std::numbers::pi, 0.0,
                        det_south > 0.0 ? FixedPointKind::Elliptic : FixedPointKind::Hyperbolic,
                        -p.spin * lt});
  if (U > 0.0 && std::abs(lt / (2.0 * U)) <= 1.0) {
    const double theta = std::acos(-lt / (2.0 * U));
    // Along the meridian the energy is an extremum in both directions for
    // U > 0 (a minimum), except where the pair merges with a pole.
    const double s = std::sin(theta);
    const FixedPointKind kind = s > 0.0 ? FixedPointKind::Elliptic : FixedPointKind::Hyperbolic;
    const double e = -p.spin * (U + lt * lt / (4.0 * U));
    set.points.push_back({theta, 0.0, kind, e});
    set.points.push_back({theta, std::numbers::pi, kind, e});
  }
  return set;
}

std::vector<AdiabaticEnergyRow> adiabatic_energy_curves(const ModelParams& p,
                                                        std::span<const double> times) {
  p.validate_operator_params();
  std::vector<AdiabaticEnergyRow> rows;
  rows.reserve(times.size());
  const double S = p.spin, U = p.U;
  for (double t : times) {
    const double lt = p.lambda * t;
    AdiabaticEnergyRow r;
    r.t = t;
    r.E_north = S * lt;
    r.E_south = -S * lt;
    r.E_elliptic = U != 0.0 ? -S * (U + lt * lt / (4.0 * U)) : -S * std::abs(lt);
    r.elliptic_exists = U > 0.0 && std::abs(lt) <= 2.0 * U;
    rows.push_back(r);
  }
  return rows;
}

std::pair<double, double> bifurcation_times(const ModelParams& p) {
  return {-2.0 * p.U / p.lambda, 2.0 * p.U / p.lambda};
}

ActionResult classical_action(const TrajectoryRecord& traj, double t_begin) {
  const std::size_t n = traj.t.size();
  std::size_t i0 = 0;
  while (i0 < n && traj.t[i0] < t_begin) ++i0;
  if (i0 + 1 >= n) throw NoClosedOrbit("no samples after the requested start time");

  const double phi0 = traj.phi_unwrapped[i0];
  double sense = 0.0;
  double integral = 0.0;
  for (std::size_t j = i0 + 1; j < n; ++j) {
    const double pa = traj.phi_unwrapped[j - 1], pb = traj.phi_unwrapped[j];
    const double step = pb - pa;
    if (step == 0.0) throw NoClosedOrbit("phi stalls; orbit winding is ambiguous");
    const double s = step > 0.0 ? 1.0 : -1.0;
    if (sense == 0.0) sense = s;
    if (s != sense) throw NoClosedOrbit("phi turns back before completing a winding");
    const double za = traj.states[j - 1].z(), zb = traj.states[j].z();
    const double target = phi0 + sense * two_pi;
    if ((pb - target) * sense >= 0.0) {
      const double f = (target - pa) / step;
      const double z_cross = za + f * (zb - za);
      integral += 0.5 * (za + z_cross) * (target - pa);
      const double t_cross = traj.t[j - 1] + f * (traj.t[j] - traj.t[j - 1]);
      return ActionResult{sense * integral, traj.t[i0], t_cross};
    }
    integral += 0.5 * (za + zb) * step;
  }
  throw NoClosedOrbit("phi does not complete a 2 pi winding within the record");
}

}  // namespace lzlmg
