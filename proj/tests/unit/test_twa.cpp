#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "lzlmg/fitting.hpp"
#include "lzlmg/twa.hpp"

using namespace lzlmg;

TEST(Sampling, ZeroSpreadKeepsZ) {
  NoiseModel nm;
  nm.z_spread = 0.0;
  nm.n_traj = 200;
  const auto s = sample_initial_states(nm);
  ASSERT_EQ(s.size(), 200u);
  std::complex<double> phase = 0.0;
  for (const auto& b : s) {
    EXPECT_NEAR(b.z(), 0.98, 1e-15);
    phase += std::polar(1.0, b.phi);
  }
  EXPECT_LT(std::abs(phase) / 200.0, 3.0 / std::sqrt(200.0));
}

TEST(Sampling, MomentsWithinStatisticalBounds) {
  NoiseModel nm;
  nm.z_mean = 0.5;
  nm.z_spread = 0.2;
  nm.n_traj = 5000;
  nm.seed = 77;
  const auto s = sample_initial_states(nm);
  double mean = 0.0;
  std::complex<double> phase = 0.0;
  for (const auto& b : s) {
    mean += b.z();
    phase += std::polar(1.0, b.phi);
    EXPECT_GE(b.phi, 0.0);
    EXPECT_LT(b.phi, 2.0 * std::numbers::pi);
  }
  mean /= nm.n_traj;
  EXPECT_NEAR(mean, 0.5, 3.0 * nm.width() / std::sqrt(nm.n_traj));
  EXPECT_LT(std::abs(phase) / nm.n_traj, 3.0 / std::sqrt(nm.n_traj));
}

TEST(Sampling, TruncatedToSphere) {
  NoiseModel nm;  // 0.98 with sigma 0.049: a visible fraction would exceed 1
  nm.n_traj = 3000;
  for (const auto& b : sample_initial_states(nm)) {
    EXPECT_LE(b.z(), 1.0);
    EXPECT_GE(b.z(), -1.0);
  }
  nm.law = NoiseLaw::Uniform;
  for (const auto& b : sample_initial_states(nm)) EXPECT_LE(std::abs(b.z() - 0.98), nm.width() + 1e-15);
}

TEST(Sampling, DeterministicPerSeed) {
  NoiseModel nm;
  nm.n_traj = 50;
  nm.seed = 12345;
  const auto a = sample_initial_states(nm), b = sample_initial_states(nm);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].theta, b[k].theta);
    EXPECT_EQ(a[k].phi, b[k].phi);
  }
  nm.seed = 12346;
  EXPECT_NE(sample_initial_states(nm)[0].phi, a[0].phi);
  // A prefix of a larger sample set is the smaller set.
  nm.seed = 12345;
  nm.n_traj = 80;
  const auto c = sample_initial_states(nm);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(c[k].phi, a[k].phi);
}

TEST(Sampling, RejectionLoopGivesUp) {
  NoiseModel nm;
  nm.z_mean = 1.0;
  nm.z_spread = 1e3;
  nm.max_rejections = 3;
  nm.n_traj = 100;
  EXPECT_THROW(sample_initial_states(nm), Error);
  nm.z_mean = 1.5;
  EXPECT_THROW(sample_initial_states(nm), InvalidArgument);
}

TEST(TwaSweep, SingleNoiselessTrajectoryIsClassical) {
  ModelParams p;
  NoiseModel nm;
  nm.n_traj = 1;
  nm.z_spread = 0.0;
  const std::vector<double> lambdas{0.3, 1.7};
  const auto twa = twa_sweep(p, nm, lambdas);
  const BlochState init = sample_initial_states(nm)[0];
  const auto mf = meanfield_sweep(p, init, lambdas);
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    EXPECT_EQ(twa[k].z_final_mean, mf[k].z_final);
    EXPECT_EQ(twa[k].z_final_stderr, 0.0);
  }
}

TEST(TwaSweep, WorkerCountIndependent) {
  ModelParams p;
  NoiseModel nm;
  nm.n_traj = 24;
  nm.seed = 9;
  const std::vector<double> lambdas{0.25, 0.4};
  const auto a = twa_sweep(p, nm, lambdas, {}, 10.0, 1);
  const auto b = twa_sweep(p, nm, lambdas, {}, 10.0, 4);
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    EXPECT_EQ(a[k].z_final_mean, b[k].z_final_mean);
    EXPECT_EQ(a[k].z_final_stderr, b[k].z_final_stderr);
    EXPECT_EQ(a[k].seed, 9u);
    EXPECT_EQ(a[k].n_traj, 24);
  }
}

TEST(TwaSweep, ConvergesToClassicalAsSpreadShrinks) {
  // phi stays uniform, so the zero-spread limit is the classical curve
  // averaged over the sampled phases. Near lambda/U = 0.3 the final imbalance
  // amplifies z(t_i) perturbations by ~1e6, so the spreads must be tiny.
  ModelParams p;
  const std::vector<double> lambdas{0.3};
  double prev = 1e9;
  for (double spread : {1e-6, 1e-8, 1e-10, 1e-12}) {
    NoiseModel nm;
    nm.z_spread = spread;
    nm.n_traj = 8;
    const double twa = twa_sweep(p, nm, lambdas)[0].z_final_mean;
    double classical = 0.0;
    for (const BlochState& s : sample_initial_states(nm))
      classical += meanfield_sweep(p, BlochState::from_z(nm.z_mean, s.phi), lambdas)[0].z_final;
    classical /= nm.n_traj;
    const double dev = std::abs(twa - classical);
    EXPECT_LE(dev, prev);
    prev = dev;
  }
  EXPECT_LT(prev, 1e-6);
}

TEST(TwaSweep, StderrScalesWithSampleCount) {
  ModelParams p;
  const std::vector<double> lambdas{0.3};
  NoiseModel nm;
  nm.n_traj = 100;
  const double e1 = twa_sweep(p, nm, lambdas)[0].z_final_stderr;
  nm.n_traj = 400;
  const double e2 = twa_sweep(p, nm, lambdas)[0].z_final_stderr;
  EXPECT_NEAR(e1 / e2, 2.0, 0.6);
}

TEST(TwaSweep, SampleFailureCarriesCoordinates) {
  ModelParams p;
  NoiseModel nm;
  nm.n_traj = 2;
  MeanFieldOptions o;
  o.tol = {1e-30, 1e-30};  // forces a step-size underflow
  const std::vector<double> lambdas{0.5};
  try {
    twa_sweep(p, nm, lambdas, o);
    FAIL() << "expected TwaSampleError";
  } catch (const TwaSampleError& e) {
    EXPECT_EQ(e.lambda(), 0.5);
    EXPECT_GE(e.sample(), 0);
  }
}
