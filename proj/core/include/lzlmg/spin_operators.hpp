#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <vector>

#include "lzlmg/model.hpp"

namespace lzlmg {

// All operators act on |S, m> with m ordered -S, -S+1, ..., +S; basis index
// i corresponds to m = i - S.

struct SpinMatrices {
  int spin = 0;
  Eigen::MatrixXd Sx;
  Eigen::MatrixXcd Sy;
  Eigen::MatrixXd Sz;
};

SpinMatrices build_spin_matrices(int spin);

/// The two nonzero bands of -(U/S) Sx^2: main diagonal and the m <-> m+2
/// coupling. `coupling[i]` links basis indices i and i+2.
struct InteractionBands {
  std::vector<double> diagonal;
  std::vector<double> coupling;
};

InteractionBands interaction_bands(int spin, double U);

/// Dense H(t) = lambda*t*Sz - (U/S)*Sx^2. Pentadiagonal, real symmetric.
Eigen::MatrixXd build_hamiltonian(const ModelParams& p, double t);

/// H(t)*psi using the bands only; O(dim) work.
void apply_hamiltonian(const ModelParams& p, const InteractionBands& bands, double t,
                       std::span<const std::complex<double>> psi,
                       std::span<std::complex<double>> out);

enum class Parity { Even = +1, Odd = -1, Mixed = 0 };

/// Pi rotation about z, normalized so |S,S> has eigenvalue +1: diag((-1)^(S-m)).
Eigen::MatrixXd parity_operator(int spin);

/// Sector label of basis index i: +1 for S-m even.
inline int basis_parity(int index) { return (index % 2 == 0) ? +1 : -1; }

/// Sector of a state whose weight outside one sector is below `tol`.
Parity parity_of_state(const Eigen::VectorXcd& psi, double tol = 1e-8);

/// <psi|Pi|psi> / <psi|psi>.
double parity_expectation(std::span<const std::complex<double>> psi);

/// Full eigendecomposition of H(t). Eigenvalues ascend; near-ties (within
/// 1e-12 relative) are ordered with the +1 parity sector first.
struct SpectrumSlice {
  double t = 0.0;
  Eigen::VectorXd energies;
  Eigen::MatrixXd vectors;  // column n is |psi_n> in the m-basis
  std::vector<int> parity;
};

/// Diagonalizes the two parity sectors separately so every eigenvector has
/// definite parity even inside degenerate pairs. Throws EigenSolverError.
SpectrumSlice spectrum_at(const ModelParams& p, double t);

/// One slice per time, in input order. `workers` > 1 evaluates concurrently.
std::vector<SpectrumSlice> spectrum_scan(const ModelParams& p, std::span<const double> times,
                                         int workers = 1);

}  // namespace lzlmg
