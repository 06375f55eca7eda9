#include "lzlmg/lz_reference.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "lzlmg/errors.hpp"

namespace lzlmg {

using cplx = std::complex<double>;

LZParams::LZParams(double U, double lambda, double T) : U_(U), lambda_(lambda), T_(T) {
  if (!std::isfinite(U) || U < 0.0) throw InvalidArgument("LZ coupling U must be finite and >= 0");
  if (!std::isfinite(lambda) || !(lambda > 0.0))
    throw InvalidArgument("LZ sweep velocity must be finite and > 0");
  if (!std::isfinite(T) || !(T > 0.0)) throw InvalidArgument("LZ half-window T must be finite and > 0");
  Lambda_ = 2.0 * std::numbers::pi * U * U / lambda;
}

LZParams LZParams::from_adiabaticity(double Lambda, double lambda, double T) {
  if (!std::isfinite(Lambda) || Lambda < 0.0) throw InvalidArgument("Lambda must be finite and >= 0");
  if (!(lambda > 0.0)) throw InvalidArgument("LZ sweep velocity must be > 0");
  return LZParams(std::sqrt(Lambda * lambda / (2.0 * std::numbers::pi)), lambda, T);
}

double lz_probability(const LZParams& p) { return std::exp(-p.Lambda()); }

std::complex<double> log_gamma(std::complex<double> z) {
  constexpr double pi = std::numbers::pi;
  if (z.real() < 0.5) {
    // Gamma(z) Gamma(1 - z) = pi / sin(pi z)
    return std::log(pi) - std::log(std::sin(pi * z)) - log_gamma(1.0 - z);
  }
  static constexpr std::array<double, 9> coeff = {
      0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
      771.32342877765313,      -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
  constexpr double g = 7.0;
  z -= 1.0;
  cplx series = coeff[0];
  for (std::size_t k = 1; k < coeff.size(); ++k) series += coeff[k] / (z + static_cast<double>(k));
  const cplx t = z + g + 0.5;
  return 0.5 * std::log(2.0 * pi) + (z + 0.5) * std::log(t) - t + std::log(series);
}

double arg_gamma(std::complex<double> z) {
  return std::remainder(log_gamma(z).imag(), 2.0 * std::numbers::pi);
}

double dynamical_phase(const LZParams& p) {
  const double T = p.T();
  return 0.5 * p.lambda() * T * T + 0.5 * p.Lambda() * std::log(std::sqrt(2.0 * p.lambda()) * T);
}

double interference_phase(double Lambda, double Phi) {
  if (!(Lambda > 0.0))
    throw InvalidArgument("interference phase is singular at Lambda = 0 (arg Gamma(0))");
  return 0.75 * std::numbers::pi - arg_gamma(cplx(0.0, 0.5 * Lambda)) + 2.0 * Phi;
}

double interference_phase(const LZParams& p) {
  return interference_phase(p.Lambda(), dynamical_phase(p));
}

Eigen::Matrix2cd scattering_matrix(const LZParams& p) {
  const double P = lz_probability(p);
  const cplx s1 = std::sqrt(1.0 - P) * std::polar(1.0, interference_phase(p));
  const cplx s2 = P;
  Eigen::Matrix2cd s;
  s << s1, s2, -s2, std::conj(s1);
  return s;
}

double interference_probability_at_phase(const LZParams& p, double theta, double Phi) {
  const double P = lz_probability(p);
  const double c = std::cos(theta), s = std::sin(theta);
  const double chi = interference_phase(p.Lambda(), Phi);
  return c * c * (1.0 - P) + s * s * P + std::sin(2.0 * theta) * P * std::sqrt(1.0 - P) * std::cos(chi);
}

double interference_probability(const LZParams& p, double theta) {
  return interference_probability_at_phase(p, theta, dynamical_phase(p));
}

double interference_amplitude(const LZParams& p, double theta) {
  const double P = lz_probability(p);
  return std::abs(std::sin(2.0 * theta)) * P * std::sqrt(1.0 - P);
}

TwoLevelResult integrate_two_level(const LZParams& p, const TwoLevelState& initial,
                                   OdeTolerances tol) {
  using State = std::array<cplx, 2>;
  const double lambda = p.lambda(), U = p.U(), T = p.T();
  const double n0 = initial.norm();
  if (!(n0 > 0.0)) throw InvalidArgument("initial two-level state has zero norm");

  // c1 = a1 exp(-i lambda t^2 / 2), c2 = a2 exp(+i lambda t^2 / 2)
  // i da1/dt = U exp(+i lambda t^2) a2,  i da2/dt = U exp(-i lambda t^2) a1
  auto rhs = [&](const State& a, State& da, double t) {
    const cplx rot = std::polar(1.0, lambda * t * t);
    da[0] = cplx(0.0, -U) * rot * a[1];
    da[1] = cplx(0.0, -U) * std::conj(rot) * a[0];
  };
  const cplx half_phase = std::polar(1.0, 0.5 * lambda * T * T);
  State a = {initial.c1 * half_phase, initial.c2 * std::conj(half_phase)};

  AdaptiveIntegrator<State> integrator(tol, std::min(1e-2, 0.1 / (lambda * T + U + 1e-300)));
  double t = -T;
  integrator.advance(rhs, a, t, T);

  TwoLevelResult out;
  out.state = {a[0] * std::conj(half_phase), a[1] * half_phase};
  out.stats = integrator.stats();
  if (std::abs(out.state.norm() - n0) > 1e-9 * n0)
    throw IntegrationError("two-level norm drift exceeds 1e-9", T);
  return out;
}

}  // namespace lzlmg
