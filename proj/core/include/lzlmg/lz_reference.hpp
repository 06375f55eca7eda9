#pragma once

#include <Eigen/Dense>
#include <complex>

#include "lzlmg/ode.hpp"

namespace lzlmg {

/// Two-level sweep i d/dt (c1, c2) = [[lambda t, U], [U, -lambda t]] (c1, c2)
/// over the finite window [-T, T]. The adiabaticity parameter
/// Lambda = 2 pi U^2 / lambda is fixed at construction.
class LZParams {
 public:
  LZParams(double U, double lambda, double T);

  /// Chooses U from a target Lambda at fixed sweep velocity.
  static LZParams from_adiabaticity(double Lambda, double lambda, double T);

  double U() const { return U_; }
  double lambda() const { return lambda_; }
  double T() const { return T_; }
  double Lambda() const { return Lambda_; }

 private:
  double U_;
  double lambda_;
  double T_;
  double Lambda_;
};

/// P_LZ = exp(-Lambda).
double lz_probability(const LZParams& p);

/// Complex log-gamma: Lanczos (g = 7, 9 terms) for Re z >= 1/2, reflection
/// formula otherwise. The imaginary part is not continued across branches.
std::complex<double> log_gamma(std::complex<double> z);

/// arg Gamma(z) wrapped into (-pi, pi].
double arg_gamma(std::complex<double> z);

/// Finite-window dynamical phase
/// Phi(T) = (lambda/2) T^2 + (Lambda/2) log(sqrt(2 lambda) T).
double dynamical_phase(const LZParams& p);

/// chi = 3 pi / 4 - arg Gamma(i Lambda / 2) + 2 Phi. Requires Lambda > 0.
double interference_phase(double Lambda, double Phi);
double interference_phase(const LZParams& p);

/// [[S1, S2], [-S2, conj(S1)]] with S1 = sqrt(1 - P_LZ) e^{i chi}, S2 = P_LZ.
Eigen::Matrix2cd scattering_matrix(const LZParams& p);

/// P1 = cos^2(th)(1 - P) + sin^2(th) P + sin(2 th) P sqrt(1 - P) cos(chi),
/// chi evaluated at the finite window T.
double interference_probability(const LZParams& p, double theta);

/// Same, with the dynamical phase supplied explicitly instead of Phi(T).
double interference_probability_at_phase(const LZParams& p, double theta, double Phi);

/// Amplitude of the cos(chi) term: sin(2 theta) P_LZ sqrt(1 - P_LZ).
double interference_amplitude(const LZParams& p, double theta);

struct TwoLevelState {
  std::complex<double> c1{1.0, 0.0};
  std::complex<double> c2{0.0, 0.0};

  static TwoLevelState from_mixing_angle(double theta) {
    return {std::cos(theta), std::sin(theta)};
  }
  double norm() const { return std::norm(c1) + std::norm(c2); }
};

/// Default for the two-level integrator. The explicit stepper loses norm at a
/// rate set by the tolerance; these keep the drift near 3e-10 over T = 200.
inline constexpr OdeTolerances kTwoLevelTolerances{1e-14, 1e-15};

struct TwoLevelResult {
  TwoLevelState state;
  OdeStats stats;
};

/// Integrates the two-level equation from -T to T. The rapidly rotating
/// diabatic phases exp(-/+ i lambda t^2 / 2) are removed analytically, so
/// only the coupling U is integrated numerically. Throws IntegrationError on
/// step underflow or if the norm drifts by more than 1e-9.
TwoLevelResult integrate_two_level(const LZParams& p, const TwoLevelState& initial,
                                   OdeTolerances tol = kTwoLevelTolerances);

}  // namespace lzlmg
