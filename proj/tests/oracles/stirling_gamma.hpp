#pragma once

#include <complex>
#include <numbers>

namespace oracle {

// log Gamma on the principal branch continued from the positive real axis
// (the branch of sum_k log(z + k)): shift up by n, then the Stirling series.
inline std::complex<double> log_gamma(std::complex<double> z, int n = 20) {
  using C = std::complex<double>;
  C shift = 0.0;
  for (int k = 0; k < n; ++k) shift += std::log(z + static_cast<double>(k));
  const C w = z + static_cast<double>(n);
  // B_2k / (2k (2k - 1))
  static constexpr double coef[] = {1.0 / 12,       -1.0 / 360,    1.0 / 1260,  -1.0 / 1680,
                                    1.0 / 1188,     -691.0 / 360360, 1.0 / 156, -3617.0 / 122400};
  C series = 0.0;
  C wpow = 1.0 / w;
  const C w2 = w * w;
  for (double c : coef) {
    series += c * wpow;
    wpow /= w2;
  }
  const C stirling = (w - 0.5) * std::log(w) - w + 0.5 * std::log(2.0 * std::numbers::pi) + series;
  return stirling - shift;
}

// |Gamma(i y)|^2 = pi / (y sinh(pi y))
inline double abs_gamma_imag_sq(double y) { return std::numbers::pi / (y * std::sinh(std::numbers::pi * y)); }

inline double wrap_pi(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  return a <= -std::numbers::pi ? a + 2.0 * std::numbers::pi : a;
}

}  // namespace oracle
