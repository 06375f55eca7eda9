#include "lzlmg/quantum.hpp"

#include <cmath>
#include <complex>
#include <sstream>

#include "lzlmg/diagnostics.hpp"
#include "lzlmg/errors.hpp"
#include "lzlmg/parallel.hpp"
#include "lzlmg/spin_operators.hpp"

namespace lzlmg {

namespace {

using cplx = std::complex<double>;
using State = std::vector<cplx>;

double squared_norm(const State& c) {
  double n = 0.0;
  for (const cplx& a : c) n += std::norm(a);
  return n;
}

// Right-hand side in the interaction picture with respect to the diagonal of H.
class InteractionPictureRhs {
 public:
  InteractionPictureRhs(const ModelParams& p, double t0)
      : lambda_(p.lambda), t0_(t0), bands_(interaction_bands(p.spin, p.U)) {
    const std::size_t d = bands_.diagonal.size();
    offset_.resize(d >= 2 ? d - 2 : 0);
    for (std::size_t i = 0; i + 2 < d; ++i) offset_[i] = bands_.diagonal[i] - bands_.diagonal[i + 2];
    // D_m - D_{m+2} is linear in m, which allows a multiplicative recurrence.
    linear_ = true;
    if (offset_.size() >= 2) {
      slope_ = offset_[1] - offset_[0];
      const double tol = 1e-12 * (1.0 + std::abs(offset_.back()));
      for (std::size_t i = 0; i < offset_.size(); ++i)
        if (std::abs(offset_[i] - (offset_[0] + slope_ * static_cast<double>(i))) > tol) linear_ = false;
    }
    phase_.resize(offset_.size());
  }

  void operator()(const State& c, State& dc, double t) {
    const double s = t - t0_;
    const cplx common = std::polar(1.0, -lambda_ * s * (t + t0_));
    if (linear_) {
      const cplx step = std::polar(1.0, slope_ * s);
      cplx cur = offset_.empty() ? cplx(1.0) : common * std::polar(1.0, offset_[0] * s);
      for (std::size_t i = 0; i < phase_.size(); ++i) {
        phase_[i] = cur;
        cur *= step;
      }
    } else {
      for (std::size_t i = 0; i < phase_.size(); ++i) phase_[i] = common * std::polar(1.0, offset_[i] * s);
    }
    const std::size_t d = c.size();
    const std::vector<double>& k = bands_.coupling;
    for (std::size_t i = 0; i < d; ++i) {
      cplx acc = 0.0;
      if (i + 2 < d) acc += k[i] * phase_[i] * c[i + 2];
      if (i >= 2) acc += k[i - 2] * std::conj(phase_[i - 2]) * c[i - 2];
      dc[i] = cplx(acc.imag(), -acc.real());  // -i * acc
    }
  }

  // exp(-i theta_i(t)), theta_i = m lambda (t^2 - t0^2)/2 + D_i (t - t0)
  cplx lab_phase(int spin, std::size_t i, double t) const {
    const double m = static_cast<double>(i) - spin;
    const double theta = 0.5 * m * lambda_ * (t - t0_) * (t + t0_) + bands_.diagonal[i] * (t - t0_);
    return std::polar(1.0, -theta);
  }

 private:
  double lambda_;
  double t0_;
  InteractionBands bands_;
  std::vector<double> offset_;
  double slope_ = 0.0;
  bool linear_ = true;
  std::vector<cplx> phase_;
};

}  // namespace

QuantumState initial_ground_state(const ModelParams& p) {
  p.validate();
  if (p.U > 0.0 && p.initial_time_in_critical_region()) {
    std::ostringstream msg;
    msg << "initial time t_i = " << p.t_i << " lies inside the critical region |lambda t / U| < 2";
    warn(msg.str());
  }
  const SpectrumSlice slice = spectrum_at(p, p.t_i);
  Eigen::VectorXd v = slice.vectors.col(0);
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  if (v[imax] < 0.0) v = -v;
  return QuantumState{v.cast<cplx>(), p.t_i};
}

PropagationResult propagate(const ModelParams& p, const QuantumState& psi0,
                            const QuantumOptions& opts) {
  p.validate();
  const std::size_t d = static_cast<std::size_t>(p.dim());
  if (static_cast<std::size_t>(psi0.amplitudes.size()) != d)
    throw InvalidArgument("state dimension does not match 2S + 1");
  if (!(psi0.t < p.t_f)) throw InvalidArgument("state time must precede t_f");
  if (opts.norm_checks < 1) throw InvalidArgument("norm_checks must be >= 1");

  const double t0 = psi0.t;
  InteractionPictureRhs rhs(p, t0);
  State c(psi0.amplitudes.data(), psi0.amplitudes.data() + d);
  const double n0 = squared_norm(c);
  if (std::abs(n0 - 1.0) > 1e-9) throw InvalidArgument("initial state is not normalized");
  const double parity0 = parity_expectation(c);

  const double scale = std::abs(p.lambda * std::max(std::abs(t0), std::abs(p.t_f))) * p.spin + p.U * p.spin + 1.0;
  AdaptiveIntegrator<State> integrator(opts.tol, std::min(1e-2, 0.1 / scale));
  double t = t0;
  for (int k = 1; k <= opts.norm_checks; ++k) {
    const double target = k == opts.norm_checks
                              ? p.t_f
                              : t0 + (p.t_f - t0) * static_cast<double>(k) / opts.norm_checks;
    integrator.advance(rhs, c, t, target);
    const double drift = std::abs(squared_norm(c) - n0);
    if (drift > opts.norm_abort) {
      std::ostringstream msg;
      msg << "norm drift " << drift << " exceeds " << opts.norm_abort << " (S = " << p.spin
          << ", lambda = " << p.lambda << ", " << integrator.stats().accepted << " steps)";
      throw IntegrationError(msg.str(), t);
    }
  }

  PropagationResult out;
  out.state.t = p.t_f;
  out.state.amplitudes.resize(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i)
    out.state.amplitudes[static_cast<Eigen::Index>(i)] = c[i] * rhs.lab_phase(p.spin, i, p.t_f);
  out.norm_drift = std::abs(squared_norm(c) - n0);
  out.parity_drift = std::abs(parity_expectation(c) - parity0);
  out.stats = integrator.stats();
  return out;
}

ExcitationReport report_from_populations(std::vector<double> populations) {
  ExcitationReport r;
  const std::size_t n = populations.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double w = populations[k], kk = static_cast<double>(k);
    r.moment1 += kk * w;
    r.moment2 += kk * kk * w;
  }
  r.P_ex = n > 0 ? r.moment1 / static_cast<double>(n) : 0.0;
  r.mandel_Q = r.moment1 > kMomentFloor ? (r.moment2 - r.moment1 * r.moment1) / r.moment1 - 1.0 : -1.0;
  r.populations = std::move(populations);
  return r;
}

ExcitationReport excitation_report(const ModelParams& p, const QuantumState& psi) {
  const SpectrumSlice slice = spectrum_at(p, psi.t);
  const Eigen::Index d = slice.energies.size();
  if (psi.amplitudes.size() != d) throw InvalidArgument("state dimension does not match 2S + 1");

  const Eigen::VectorXcd overlaps = slice.vectors.cast<cplx>().adjoint() * psi.amplitudes;
  std::vector<double> pop(static_cast<std::size_t>(d));
  for (Eigen::Index n = 0; n < d; ++n) pop[static_cast<std::size_t>(n)] = std::norm(overlaps[n]);

  std::vector<std::pair<int, int>> blocks;
  for (Eigen::Index n = 0; n < d;) {
    Eigen::Index last = n;
    while (last + 1 < d && slice.energies[last + 1] - slice.energies[last] < 1e-10) ++last;
    if (last > n) {
      double total = 0.0;
      for (Eigen::Index k = n; k <= last; ++k) total += pop[static_cast<std::size_t>(k)];
      for (Eigen::Index k = n; k <= last; ++k)
        pop[static_cast<std::size_t>(k)] = total / static_cast<double>(last - n + 1);
      blocks.emplace_back(static_cast<int>(n), static_cast<int>(last));
    }
    n = last + 1;
  }

  ExcitationReport r = report_from_populations(std::move(pop));
  r.degenerate_blocks = std::move(blocks);
  double sz = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) sz += (static_cast<double>(i) - p.spin) * std::norm(psi.amplitudes[i]);
  r.Sz = sz / psi.amplitudes.squaredNorm();
  return r;
}

std::vector<QuantumPoint> quantum_sweep(const ModelParams& p, std::span<const int> spins,
                                        std::span<const double> lambdas,
                                        const QuantumOptions& opts, int workers) {
  const std::size_t nl = lambdas.size();
  std::vector<QuantumPoint> out(spins.size() * nl);
  for (std::size_t si = 0; si < spins.size(); ++si)
    for (std::size_t li = 0; li < nl; ++li) {
      ModelParams q = p;
      q.spin = spins[si];
      q.lambda = lambdas[li];
      if (q.final_time_in_critical_region()) {
        std::ostringstream msg;
        msg << "lambda * t_f = " << q.lambda * q.t_f << " < 2U: final time is inside the critical region";
        warn(msg.str());
      }
    }
  parallel_for(out.size(), workers, [&](std::size_t job) {
    QuantumPoint& pt = out[job];
    ModelParams q = p;
    q.spin = spins[job / nl];
    q.lambda = lambdas[job % nl];
    pt.spin = q.spin;
    pt.lambda = q.lambda;
    try {
      const PropagationResult res = propagate(q, initial_ground_state(q), opts);
      pt.report = excitation_report(q, res.state);
      pt.norm_drift = res.norm_drift;
      pt.parity_drift = res.parity_drift;
      pt.n_steps = res.stats.accepted;
      pt.ok = true;
    } catch (const Error& e) {
      pt.ok = false;
      pt.error = e.what();
    }
  });
  return out;
}

}  // namespace lzlmg
