#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lzlmg/meanfield.hpp"

namespace lzlmg {

enum class NoiseLaw { Gaussian, Uniform };

/// Initial-condition noise for truncated-Wigner sampling. The spread is
/// relative: Gaussian sigma (or uniform half-width) = z_spread * |z_mean|.
/// Draws outside [-1, 1] are rejected; phi is uniform on [0, 2 pi).
struct NoiseModel {
  double z_mean = 0.98;
  double z_spread = 0.05;
  NoiseLaw law = NoiseLaw::Gaussian;
  int n_traj = 1000;
  std::uint64_t seed = 0;
  int max_rejections = 10000;

  void validate() const;
  double width() const;
};

/// n_traj states. Sample i uses its own generator seeded from (seed, i), so
/// the sequence does not depend on how samples are distributed over threads.
std::vector<BlochState> sample_initial_states(const NoiseModel& nm);

struct TwaPoint {
  double lambda = 0.0;
  double z_final_mean = 0.0;
  double z_final_stderr = 0.0;
  int n_traj = 0;
  std::uint64_t seed = 0;
};

/// Thrown when a sampled trajectory fails; carries the grid coordinates.
class TwaSampleError : public Error {
 public:
  TwaSampleError(double lambda, int sample, const std::string& what)
      : Error("TWA trajectory failed at lambda = " + std::to_string(lambda) + ", sample " +
              std::to_string(sample) + ": " + what),
        lambda_(lambda),
        sample_(sample) {}
  double lambda() const { return lambda_; }
  int sample() const { return sample_; }

 private:
  double lambda_;
  int sample_;
};

/// For each lambda, propagates every sampled initial state with the mean-field
/// equations and averages the final imbalance incoherently. The same sample
/// set is reused for every lambda. Sums are formed in sample order, so the
/// result is independent of `workers`.
std::vector<TwaPoint> twa_sweep(const ModelParams& p, const NoiseModel& nm,
                                std::span<const double> lambdas,
                                const MeanFieldOptions& opts = {}, double window = 10.0,
                                int workers = 1);

}  // namespace lzlmg
