#pragma once

#include <limits>
#include <span>
#include <vector>

#include "lzlmg/errors.hpp"
#include "lzlmg/model.hpp"
#include "lzlmg/ode.hpp"

namespace lzlmg {

/// Point on the Bloch sphere. phi is kept in [0, 2 pi).
struct BlochState {
  double theta = 0.0;
  double phi = 0.0;

  static BlochState from_z(double z, double phi);
  double z() const;
  BlochState wrapped() const;
};

/// H_cl / S = lambda t cos(theta) - U sin^2(theta) cos^2(phi).
double classical_energy(const ModelParams& p, const BlochState& s, double t);

struct MeanFieldOptions {
  OdeTolerances tol{};
  /// Spacing of recorded samples.
  double sample_dt = 0.01;
  /// Samples before this time are not stored (the integration still starts
  /// at the trajectory start). -inf records everything.
  double record_from = -std::numeric_limits<double>::infinity();
};

struct TrajectoryRecord {
  std::vector<double> t;
  std::vector<BlochState> states;   // phi wrapped
  std::vector<double> phi_unwrapped;
  std::vector<double> energy;       // classical_energy at each sample
  long n_steps = 0;
  long n_rejected = 0;
  /// |E(end) - E(start) - integral of dE/dt| over the whole run. Zero for an
  /// exact solution; measures integration error, not energy conservation.
  double energy_drift_diag = 0.0;
};

/// Integrates
///   dphi/dt   = lambda t sin(theta) + U sin(2 theta) cos^2(phi)
///   dtheta/dt = U sin^2(theta) sin(2 phi)
/// from p.t_i to p.t_f. Throws IntegrationError with the failure time.
TrajectoryRecord integrate_meanfield(const ModelParams& p, const BlochState& initial,
                                     const MeanFieldOptions& opts = {});

/// Same equations between arbitrary times; t_end < t_start integrates
/// backwards.
TrajectoryRecord integrate_meanfield_between(const ModelParams& p, const BlochState& initial,
                                             double t_start, double t_end,
                                             const MeanFieldOptions& opts = {});

/// Time average (trapezoidal) of z over the trailing `window` of the record.
double final_imbalance(const TrajectoryRecord& traj, double window = 10.0);

struct MeanFieldPoint {
  double lambda = 0.0;
  double z_final = 0.0;
  long n_steps = 0;
  double energy_drift_diag = 0.0;
};

/// Runs one trajectory per lambda (p.lambda is overridden), keeping only the
/// averaging window in memory. Output is ordered like `lambdas`.
std::vector<MeanFieldPoint> meanfield_sweep(const ModelParams& p, const BlochState& initial,
                                            std::span<const double> lambdas,
                                            const MeanFieldOptions& opts = {},
                                            double window = 10.0, int workers = 1);

enum class FixedPointKind { Elliptic, Hyperbolic };

struct FixedPoint {
  double theta = 0.0;
  double phi = 0.0;
  FixedPointKind kind = FixedPointKind::Hyperbolic;
  double E_ad = 0.0;  // total energy S * H_cl / S at the point
};

struct FixedPointSet {
  double t = 0.0;
  std::vector<FixedPoint> points;  // north pole, south pole, then elliptic pair
};

/// Poles plus, for |lambda t / 2U| <= 1, the pair (arccos(-lambda t / 2U), 0 or pi).
/// Kind comes from the sign of the determinant of the energy Hessian in a
/// local chart (extremum: elliptic, saddle or flat direction: hyperbolic).
FixedPointSet fixed_points(const ModelParams& p, double t);

struct AdiabaticEnergyRow {
  double t = 0.0;
  double E_north = 0.0;     //  S lambda t
  double E_south = 0.0;     // -S lambda t
  double E_elliptic = 0.0;  // -S (U + lambda^2 t^2 / 4U)
  bool elliptic_exists = false;
};

std::vector<AdiabaticEnergyRow> adiabatic_energy_curves(const ModelParams& p,
                                                        std::span<const double> times);

/// Times lambda t / U = -2 and +2 where the elliptic branch merges with the poles.
std::pair<double, double> bifurcation_times(const ModelParams& p);

class NoClosedOrbit : public Error {
 public:
  explicit NoClosedOrbit(const std::string& msg) : Error(msg) {}
};

struct ActionResult {
  double I = 0.0;
  double t_begin = 0.0;
  double t_end = 0.0;
};

/// I = closed-loop integral of z dphi over the first full phi winding that
/// starts at or after t_begin. The sign follows the sense of rotation so that
/// constant-z precession gives 2 pi z. Throws NoClosedOrbit if phi does not
/// wind by 2 pi, or turns back, before the record ends.
ActionResult classical_action(const TrajectoryRecord& traj, double t_begin);

}  // namespace lzlmg
