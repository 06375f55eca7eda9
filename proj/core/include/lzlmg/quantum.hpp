#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lzlmg/model.hpp"
#include "lzlmg/ode.hpp"

namespace lzlmg {

struct QuantumState {
  Eigen::VectorXcd amplitudes;  // m-basis, m = -S..S
  double t = 0.0;
};

struct QuantumOptions {
  /// Tight defaults: the explicit stepper is not unitary, and these keep the
  /// norm within 1e-9 up to S ~ 100 and lambda / U ~ 10 over t in [-200, 200].
  OdeTolerances tol{1e-14, 1e-15};
  int norm_checks = 40;
  double norm_abort = 1e-8;
};

/// Lowest eigenvector of H(t_i), sign fixed so its largest-magnitude amplitude
/// is real positive. Warns if t_i lies inside the critical region.
QuantumState initial_ground_state(const ModelParams& p);

struct PropagationResult {
  QuantumState state;
  double norm_drift = 0.0;    // |<psi|psi>(t_f) - <psi|psi>(t_i)|
  double parity_drift = 0.0;  // |<Pi>(t_f) - <Pi>(t_i)|
  OdeStats stats;
};

/// Solves i d/dt psi = H(t) psi from psi0.t to p.t_f.
///
/// The diagonal part lambda t m + D_m is integrated analytically (interaction
/// picture), so the adaptive stepper only sees the m <-> m+2 couplings dressed
/// by exp(-i lambda (t^2 - t_i^2) + i (D_m - D_{m+2}) (t - t_i)). The norm is
/// monitored at `norm_checks` points and never renormalized; drift beyond
/// `norm_abort` throws IntegrationError.
PropagationResult propagate(const ModelParams& p, const QuantumState& psi0,
                            const QuantumOptions& opts = {});

struct ExcitationReport {
  std::vector<double> populations;  // P(n), n = 0..2S over H(t) eigenstates
  double P_ex = 0.0;                // sum n P(n) / (2S + 1)
  double mandel_Q = -1.0;
  double moment1 = 0.0;  // sum n P(n)
  double moment2 = 0.0;  // sum n^2 P(n)
  double Sz = 0.0;       // <Sz>
  /// Index ranges [first, last] of eigenvalue blocks with gaps < 1e-10. Their
  /// total population is shared evenly over the block.
  std::vector<std::pair<int, int>> degenerate_blocks;
};

/// Projects psi onto the instantaneous eigenbasis at psi.t.
ExcitationReport excitation_report(const ModelParams& p, const QuantumState& psi);

/// First moments at or below this are projection roundoff (amplitudes of
/// order 1e-12 or less); Q is reported as -1 there.
inline constexpr double kMomentFloor = 1e-24;

/// Moments and Mandel Q of a distribution over n = 0..N-1 (Q = -1 when the
/// first moment vanishes).
ExcitationReport report_from_populations(std::vector<double> populations);

struct QuantumPoint {
  int spin = 0;
  double lambda = 0.0;
  bool ok = false;
  std::string error;
  ExcitationReport report;
  double norm_drift = 0.0;
  double parity_drift = 0.0;
  long n_steps = 0;
};

/// Ground-state sweep for every (S, lambda) pair, ordered S-major. A failing
/// point is recorded with ok = false and the campaign continues.
std::vector<QuantumPoint> quantum_sweep(const ModelParams& p, std::span<const int> spins,
                                        std::span<const double> lambdas,
                                        const QuantumOptions& opts = {}, int workers = 1);

}  // namespace lzlmg
