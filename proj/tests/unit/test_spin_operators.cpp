#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "dense_lmg.hpp"
#include "lzlmg/spin_operators.hpp"

using namespace lzlmg;
using cplx = std::complex<double>;

namespace {

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(SpinMatrices, SpinOneSz) {
  const SpinMatrices s = build_spin_matrices(1);
  Eigen::MatrixXd expected = Eigen::Vector3d(-1, 0, 1).asDiagonal();
  EXPECT_EQ(s.Sz, expected);
}

TEST(SpinMatrices, SpinOneSxByHand) {
  const SpinMatrices s = build_spin_matrices(1);
  const double r = 1.0 / std::sqrt(2.0);
  Eigen::Matrix3d expected;
  expected << 0, r, 0, r, 0, r, 0, r, 0;
  EXPECT_LT((s.Sx - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(SpinMatrices, MatchLadderOracle) {
  for (int S : {1, 2, 7, 30}) {
    const SpinMatrices s = build_spin_matrices(S);
    const oracle::Spin o = oracle::spin(S);
    EXPECT_LT(max_abs(s.Sx.cast<cplx>() - o.Sx), 1e-14) << S;
    EXPECT_LT(max_abs(s.Sy - o.Sy), 1e-14) << S;
    EXPECT_LT(max_abs(s.Sz.cast<cplx>() - o.Sz), 1e-14) << S;
  }
}

TEST(SpinMatrices, AlgebraAndCasimir) {
  for (int S : {1, 3, 10, 50, 500}) {
    const SpinMatrices s = build_spin_matrices(S);
    const Eigen::MatrixXcd X = s.Sx.cast<cplx>(), Y = s.Sy, Z = s.Sz.cast<cplx>();
    const cplx i(0.0, 1.0);
    const double eps = 1e-14 * S * (S + 1.0);
    EXPECT_LT(max_abs(X * Y - Y * X - i * Z), eps) << S;
    EXPECT_LT(max_abs(Y * Z - Z * Y - i * X), eps) << S;
    EXPECT_LT(max_abs(Z * X - X * Z - i * Y), eps) << S;
    EXPECT_LT(max_abs(X - X.adjoint()), 1e-15);
    EXPECT_LT(max_abs(Y - Y.adjoint()), 1e-15);
    const Eigen::MatrixXcd cas = X * X + Y * Y + Z * Z;
    const double scale = S * (S + 1.0);
    EXPECT_LT(max_abs(cas - scale * Eigen::MatrixXcd::Identity(2 * S + 1, 2 * S + 1)) / scale, 1e-10) << S;
  }
}

TEST(SpinMatrices, RejectsBadSpin) {
  EXPECT_THROW(build_spin_matrices(0), InvalidArgument);
  EXPECT_THROW(build_spin_matrices(-3), InvalidArgument);
  EXPECT_THROW(checked_integer_spin(2.5), InvalidArgument);
  EXPECT_EQ(checked_integer_spin(4.0), 4);
}

TEST(Hamiltonian, SpinOneAtZeroTime) {
  ModelParams p;
  p.spin = 1;
  p.U = 1.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(build_hamiltonian(p, 0.0));
  EXPECT_NEAR(es.eigenvalues()[0], -1.0, 1e-14);
  EXPECT_NEAR(es.eigenvalues()[1], -1.0, 1e-14);
  EXPECT_NEAR(es.eigenvalues()[2], 0.0, 1e-14);
}

TEST(Hamiltonian, DecoupledEigenvalues) {
  ModelParams p;
  p.spin = 6;
  p.U = 0.0;
  p.lambda = 0.7;
  const double t = 3.1;
  const SpectrumSlice s = spectrum_at(p, t);
  for (int k = 0; k < p.dim(); ++k) EXPECT_DOUBLE_EQ(s.energies[k], p.lambda * t * (k - p.spin));
}

TEST(Hamiltonian, Pentadiagonal) {
  ModelParams p;
  p.spin = 9;
  p.U = 1.7;
  p.lambda = 0.3;
  const Eigen::MatrixXd H = build_hamiltonian(p, -2.5);
  for (int a = 0; a < H.rows(); ++a)
    for (int b = 0; b < H.cols(); ++b)
      if (std::abs(a - b) != 0 && std::abs(a - b) != 2) EXPECT_EQ(H(a, b), 0.0);
  EXPECT_LT((H - H.transpose()).cwiseAbs().maxCoeff(), 0.0 + 1e-300);
}

TEST(Hamiltonian, MatchesOracle) {
  ModelParams p;
  p.spin = 8;
  p.U = 1.3;
  p.lambda = 0.45;
  const oracle::Spin o = oracle::spin(p.spin);
  for (double t : {-7.0, 0.0, 2.2}) {
    const Eigen::MatrixXcd ref = oracle::hamiltonian(o, p.spin, p.U, p.lambda, t);
    EXPECT_LT(max_abs(build_hamiltonian(p, t).cast<cplx>() - ref), 1e-13);
  }
}

TEST(Hamiltonian, BandedProductMatchesDense) {
  ModelParams p;
  p.spin = 11;
  p.U = 0.8;
  p.lambda = 1.9;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  std::vector<cplx> psi(static_cast<std::size_t>(p.dim())), out(psi.size());
  for (auto& a : psi) a = {g(rng), g(rng)};
  const InteractionBands bands = interaction_bands(p.spin, p.U);
  apply_hamiltonian(p, bands, 1.4, psi, out);
  const Eigen::VectorXcd ref =
      build_hamiltonian(p, 1.4).cast<cplx>() * Eigen::Map<Eigen::VectorXcd>(psi.data(), p.dim());
  for (int i = 0; i < p.dim(); ++i) EXPECT_LT(std::abs(out[static_cast<std::size_t>(i)] - ref[i]), 1e-12);
}

TEST(Parity, CommutesWithHamiltonian) {
  for (int S : {1, 4, 25, 500}) {
    ModelParams p;
    p.spin = S;
    p.U = 1.1;
    p.lambda = 0.6;
    const Eigen::MatrixXd P = parity_operator(S);
    for (double t : {-3.0, 0.4}) {
      const Eigen::MatrixXd H = build_hamiltonian(p, t);
      EXPECT_LT((H * P - P * H).cwiseAbs().maxCoeff(), 1e-12) << S;
    }
  }
}

TEST(Parity, StateLabels) {
  const int S = 4, d = 2 * S + 1;
  Eigen::VectorXcd top = Eigen::VectorXcd::Zero(d);
  top[d - 1] = 1.0;
  EXPECT_EQ(parity_of_state(top), Parity::Even);
  Eigen::VectorXcd next = Eigen::VectorXcd::Zero(d);
  next[d - 2] = 1.0;
  EXPECT_EQ(parity_of_state(next), Parity::Odd);
  Eigen::VectorXcd mix = (top + next) / std::sqrt(2.0);
  EXPECT_EQ(parity_of_state(mix), Parity::Mixed);
  EXPECT_NEAR(parity_expectation(std::span<const cplx>(mix.data(), d)), 0.0, 1e-15);
}

TEST(Spectrum, OrthonormalSortedDefiniteParity) {
  ModelParams p;
  p.spin = 10;
  p.U = 1.0;
  p.lambda = 1.0;
  for (double t : {-5.0, -2.0, 0.0, 0.7, 3.0}) {
    const SpectrumSlice s = spectrum_at(p, t);
    // Near-degenerate pairs are ordered even-first within the tie tolerance.
    for (int n = 0; n + 1 < p.dim(); ++n)
      EXPECT_GE(s.energies[n + 1], s.energies[n] - 1e-12 * (1.0 + std::abs(s.energies[n])));
    const Eigen::MatrixXd gram = s.vectors.transpose() * s.vectors;
    EXPECT_LT((gram - Eigen::MatrixXd::Identity(p.dim(), p.dim())).cwiseAbs().maxCoeff(), 1e-10);
    const Eigen::MatrixXd H = build_hamiltonian(p, t);
    for (int n = 0; n < p.dim(); ++n) {
      const Eigen::VectorXd v = s.vectors.col(n);
      EXPECT_LT((H * v - s.energies[n] * v).norm(), 1e-10);
      EXPECT_NE(parity_of_state(v.cast<cplx>()), Parity::Mixed);
      EXPECT_EQ(static_cast<int>(parity_of_state(v.cast<cplx>())), s.parity[static_cast<std::size_t>(n)]);
    }
  }
}

TEST(Spectrum, DeepDegenerateTieBreakPutsEvenFirst) {
  ModelParams p;
  p.spin = 20;
  p.U = 1.0;
  p.lambda = 1.0;
  const SpectrumSlice s = spectrum_at(p, 0.0);
  // Ground doublet is quasi-degenerate to far below 1e-12 here.
  ASSERT_LT(s.energies[1] - s.energies[0], 1e-12 * (1.0 + std::abs(s.energies[0])));
  EXPECT_EQ(s.parity[0], +1);
  EXPECT_EQ(s.parity[1], -1);
}

TEST(Spectrum, MatchesDenseOracle) {
  ModelParams p;
  p.spin = 7;
  p.U = 0.9;
  p.lambda = 0.35;
  const oracle::Spin o = oracle::spin(p.spin);
  for (double t : {-4.0, 1.5}) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(oracle::hamiltonian(o, p.spin, p.U, p.lambda, t));
    const SpectrumSlice s = spectrum_at(p, t);
    EXPECT_LT((s.energies - es.eigenvalues()).cwiseAbs().maxCoeff(), 1e-11);
  }
}

TEST(Spectrum, ScanKeepsInputOrder) {
  ModelParams p;
  p.spin = 5;
  const std::vector<double> times{2.0, -1.0, 0.5, 7.0, -3.0};
  const auto one = spectrum_scan(p, times, 1);
  const auto many = spectrum_scan(p, times, 3);
  ASSERT_EQ(one.size(), times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    EXPECT_EQ(one[k].t, times[k]);
    EXPECT_EQ(many[k].t, times[k]);
    EXPECT_EQ(one[k].energies, many[k].energies);
  }
}

TEST(Spectrum, SpinOneGapByHand) {
  // S = 1: the odd sector is {m = 0} with energy -U (S(S+1) - 0)/2 / S = -U;
  // the even sector {m = -1, +1} has eigenvalues -U/2 +- sqrt((lambda t)^2 + U^2/4).
  ModelParams p;
  p.spin = 1;
  p.U = 1.0;
  p.lambda = 1.0;
  for (double t : {-3.0, -0.5, 0.0, 2.0}) {
    const SpectrumSlice s = spectrum_at(p, t);
    std::vector<double> ref{-1.0, -0.5 - std::hypot(t, 0.5), -0.5 + std::hypot(t, 0.5)};
    std::sort(ref.begin(), ref.end());
    for (int n = 0; n < 3; ++n) EXPECT_NEAR(s.energies[n], ref[static_cast<std::size_t>(n)], 1e-13);
  }
}

TEST(Spectrum, CriticalGapShrinksWithS) {
  // Gap between the lowest even and lowest odd level at lambda t / U = -2.
  double previous = 1e300;
  for (int S : {5, 10, 20}) {
    ModelParams p;
    p.spin = S;
    const SpectrumSlice s = spectrum_at(p, -2.0);
    double even = 1e300, odd = 1e300;
    for (int n = 0; n < p.dim(); ++n) {
      double& slot = s.parity[static_cast<std::size_t>(n)] > 0 ? even : odd;
      slot = std::min(slot, s.energies[n]);
    }
    const double gap = std::abs(even - odd);
    EXPECT_LT(gap, previous) << S;
    previous = gap;
  }
}
