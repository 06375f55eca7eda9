#include "lzlmg/twa.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "lzlmg/parallel.hpp"

namespace lzlmg {

void NoiseModel::validate() const {
  if (!(z_mean >= -1.0 && z_mean <= 1.0)) throw InvalidArgument("noise z_mean must lie in [-1, 1]");
  if (!(z_spread >= 0.0) || !std::isfinite(z_spread))
    throw InvalidArgument("noise z_spread must be finite and >= 0");
  if (n_traj < 1) throw InvalidArgument("noise n_traj must be >= 1");
  if (max_rejections < 1) throw InvalidArgument("noise max_rejections must be >= 1");
}

double NoiseModel::width() const { return z_spread * std::abs(z_mean); }

std::vector<BlochState> sample_initial_states(const NoiseModel& nm) {
  nm.validate();
  const double width = nm.width();
  std::vector<BlochState> out;
  out.reserve(static_cast<std::size_t>(nm.n_traj));
  for (int i = 0; i < nm.n_traj; ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(nm.seed & 0xffffffffu),
                      static_cast<std::uint32_t>(nm.seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    double z = nm.z_mean;
    if (width > 0.0) {
      int attempts = 0;
      for (;;) {
        const double draw = nm.law == NoiseLaw::Gaussian ? normal(rng) : 2.0 * unit(rng) - 1.0;
        z = nm.z_mean + width * draw;
        if (z >= -1.0 && z <= 1.0) break;
        if (++attempts >= nm.max_rejections)
          throw Error("noise model keeps producing z outside [-1, 1] (sample " +
                      std::to_string(i) + ")");
      }
    }
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    out.push_back(BlochState::from_z(z, phi));
  }
  return out;
}

std::vector<TwaPoint> twa_sweep(const ModelParams& p, const NoiseModel& nm,
                                std::span<const double> lambdas, const MeanFieldOptions& opts,
                                double window, int workers) {
  p.validate();
  const std::vector<BlochState> samples = sample_initial_states(nm);
  const std::size_t ns = samples.size();
  std::vector<double> z_final(lambdas.size() * ns);

  parallel_for(z_final.size(), workers, [&](std::size_t job) {
    const std::size_t li = job / ns, si = job % ns;
    ModelParams q = p;
    q.lambda = lambdas[li];
    MeanFieldOptions o = opts;
    o.record_from = q.t_f - window;
    try {
      z_final[job] = final_imbalance(integrate_meanfield(q, samples[si], o), window);
    } catch (const Error& e) {
      throw TwaSampleError(q.lambda, static_cast<int>(si), e.what());
    }
  });

  std::vector<TwaPoint> out(lambdas.size());
  for (std::size_t li = 0; li < lambdas.size(); ++li) {
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t si = 0; si < ns; ++si) sum += z_final[li * ns + si];
    const double mean = sum / static_cast<double>(ns);
    for (std::size_t si = 0; si < ns; ++si) {
      const double d = z_final[li * ns + si] - mean;
      sum_sq += d * d;
    }
    const double stderr_ =
        ns > 1 ? std::sqrt(sum_sq / static_cast<double>(ns - 1) / static_cast<double>(ns)) : 0.0;
    out[li] = TwaPoint{lambdas[li], mean, stderr_, static_cast<int>(ns), nm.seed};
  }
  return out;
}

}  // namespace lzlmg
