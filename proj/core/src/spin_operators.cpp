#include "lzlmg/spin_operators.hpp"

#include <cmath>

#include "lzlmg/errors.hpp"
#include "lzlmg/parallel.hpp"

namespace lzlmg {

namespace {

// <m+1|S+|m>
double raising_element(int spin, double m) {
  return std::sqrt(spin * (spin + 1.0) - m * (m + 1.0));
}

void check_spin(int spin) {
  if (spin < 1) throw InvalidArgument("spin must be a positive integer, got " + std::to_string(spin));
}

}  // namespace

SpinMatrices build_spin_matrices(int spin) {
  check_spin(spin);
  const int d = 2 * spin + 1;
  SpinMatrices out;
  out.spin = spin;
  out.Sx = Eigen::MatrixXd::Zero(d, d);
  out.Sy = Eigen::MatrixXcd::Zero(d, d);
  out.Sz = Eigen::MatrixXd::Zero(d, d);
  const std::complex<double> half_i(0.0, 0.5);
  for (int i = 0; i < d; ++i) {
    const double m = i - spin;
    out.Sz(i, i) = m;
    if (i + 1 < d) {
      const double up = raising_element(spin, m);
      out.Sx(i + 1, i) = out.Sx(i, i + 1) = 0.5 * up;
      // Sy = (S+ - S-) / 2i
      out.Sy(i + 1, i) = -half_i * up;
      out.Sy(i, i + 1) = half_i * up;
    }
  }
  return out;
}

InteractionBands interaction_bands(int spin, double U) {
  check_spin(spin);
  const int d = 2 * spin + 1;
  const double scale = -U / spin;
  InteractionBands bands;
  bands.diagonal.resize(d);
  bands.coupling.assign(d > 2 ? d - 2 : 0, 0.0);
  for (int i = 0; i < d; ++i) {
    const double m = i - spin;
    // (Sx^2)_{mm} = (S(S+1) - m^2) / 2
    bands.diagonal[i] = scale * 0.5 * (spin * (spin + 1.0) - m * m);
    if (i + 2 < d) {
      // (Sx^2)_{m+2,m} = <m+2|S+|m+1><m+1|S+|m> / 4
      bands.coupling[i] = scale * 0.25 * raising_element(spin, m) * raising_element(spin, m + 1.0);
    }
  }
  return bands;
}

Eigen::MatrixXd build_hamiltonian(const ModelParams& p, double t) {
  p.validate_operator_params();
  const InteractionBands bands = interaction_bands(p.spin, p.U);
  const int d = p.dim();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    h(i, i) = p.lambda * t * (i - p.spin) + bands.diagonal[i];
    if (i + 2 < d) h(i, i + 2) = h(i + 2, i) = bands.coupling[i];
  }
  return h;
}

void apply_hamiltonian(const ModelParams& p, const InteractionBands& bands, double t,
                       std::span<const std::complex<double>> psi,
                       std::span<std::complex<double>> out) {
  const int d = static_cast<int>(psi.size());
  for (int i = 0; i < d; ++i) {
    std::complex<double> acc = (p.lambda * t * (i - p.spin) + bands.diagonal[i]) * psi[i];
    if (i + 2 < d) acc += bands.coupling[i] * psi[i + 2];
    if (i >= 2) acc += bands.coupling[i - 2] * psi[i - 2];
    out[i] = acc;
  }
}

Eigen::MatrixXd parity_operator(int spin) {
  check_spin(spin);
  const int d = 2 * spin + 1;
  Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) pi(i, i) = basis_parity(i);
  return pi;
}

Parity parity_of_state(const Eigen::VectorXcd& psi, double tol) {
  double even = 0.0, odd = 0.0;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    (basis_parity(static_cast<int>(i)) > 0 ? even : odd) += std::norm(psi[i]);
  }
  const double total = even + odd;
  if (total <= 0.0) return Parity::Mixed;
  if (odd / total < tol) return Parity::Even;
  if (even / total < tol) return Parity::Odd;
  return Parity::Mixed;
}

double parity_expectation(std::span<const std::complex<double>> psi) {
  double signed_weight = 0.0, total = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double w = std::norm(psi[i]);
    signed_weight += basis_parity(static_cast<int>(i)) * w;
    total += w;
  }
  return signed_weight / total;
}

SpectrumSlice spectrum_at(const ModelParams& p, double t) {
  if (!std::isfinite(t)) throw InvalidArgument("spectrum time must be finite");
  const Eigen::MatrixXd h = build_hamiltonian(p, t);
  const int d = p.dim();

  struct Sector {
    std::vector<int> index;
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
  };
  Sector sectors[2];  // [0]: parity +1 (even index), [1]: parity -1
  for (int i = 0; i < d; ++i) sectors[i % 2].index.push_back(i);
  for (auto& sec : sectors) {
    const int n = static_cast<int>(sec.index.size());
    Eigen::MatrixXd block(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) block(a, b) = h(sec.index[a], sec.index[b]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(block);
    if (solver.info() != Eigen::Success)
      throw EigenSolverError("symmetric eigensolver did not converge", t);
    sec.values = solver.eigenvalues();
    sec.vectors = solver.eigenvectors();
  }

  SpectrumSlice slice;
  slice.t = t;
  slice.energies.resize(d);
  slice.vectors = Eigen::MatrixXd::Zero(d, d);
  slice.parity.resize(d);
  Eigen::Index a = 0, b = 0;
  const Eigen::Index na = sectors[0].values.size(), nb = sectors[1].values.size();
  for (int n = 0; n < d; ++n) {
    bool take_even;
    if (a == na) {
      take_even = false;
    } else if (b == nb) {
      take_even = true;
    } else {
      const double ea = sectors[0].values[a], eb = sectors[1].values[b];
      const double tie = 1e-12 * (1.0 + std::max(std::abs(ea), std::abs(eb)));
      take_even = ea <= eb + tie;
    }
    const Sector& sec = take_even ? sectors[0] : sectors[1];
    const Eigen::Index k = take_even ? a++ : b++;
    slice.energies[n] = sec.values[k];
    slice.parity[n] = take_even ? +1 : -1;
    for (std::size_t r = 0; r < sec.index.size(); ++r)
      slice.vectors(sec.index[r], n) = sec.vectors(static_cast<Eigen::Index>(r), k);
  }
  return slice;
}

std::vector<SpectrumSlice> spectrum_scan(const ModelParams& p, std::span<const double> times,
                                         int workers) {
  p.validate_operator_params();
  std::vector<SpectrumSlice> out(times.size());
  parallel_for(times.size(), workers, [&](std::size_t i) { out[i] = spectrum_at(p, times[i]); });
  return out;
}

}  // namespace lzlmg
