#include "lzlmg/campaign.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "lzlmg/csv.hpp"
#include "lzlmg/diagnostics.hpp"
#include "lzlmg/errors.hpp"
#include "lzlmg/lz_reference.hpp"
#include "lzlmg/meanfield.hpp"
#include "lzlmg/parallel.hpp"
#include "lzlmg/quantum.hpp"
#include "lzlmg/spin_operators.hpp"

namespace lzlmg {

using nlohmann::json;

const char* version() { return LZLMG_VERSION_STRING; }

std::string to_string(Engine e) {
  switch (e) {
    case Engine::Spectrum: return "spectrum";
    case Engine::MeanField: return "meanfield";
    case Engine::Twa: return "twa";
    case Engine::Quantum: return "quantum";
    case Engine::Lz: return "lz";
    case Engine::Fit: return "fit";
  }
  return "?";
}

Engine engine_from_string(const std::string& s) {
  for (Engine e : {Engine::Spectrum, Engine::MeanField, Engine::Twa, Engine::Quantum, Engine::Lz,
                   Engine::Fit})
    if (to_string(e) == s) return e;
  throw ConfigError("engine", "unknown engine '" + s + "'");
}

GridSpec GridSpec::list(std::vector<double> v) {
  GridSpec g;
  g.values = std::move(v);
  g.is_list = true;
  return g;
}

GridSpec GridSpec::range(double lo, double hi, int n, bool log) {
  GridSpec g;
  g.lo = lo;
  g.hi = hi;
  g.n = n;
  g.log = log;
  return g;
}

std::vector<double> GridSpec::resolve() const {
  if (is_list) return values;
  std::vector<double> out(static_cast<std::size_t>(std::max(n, 0)));
  for (int k = 0; k < n; ++k) {
    const double f = n == 1 ? 0.0 : static_cast<double>(k) / (n - 1);
    out[static_cast<std::size_t>(k)] =
        log ? std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo))) : lo + f * (hi - lo);
  }
  if (n > 1) {
    out.front() = lo;
    out.back() = hi;
  }
  return out;
}

namespace {

// Walks one JSON object, remembering which keys were consumed so leftovers
// can be reported as unknown.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
  bool has(const std::string& k) const { return j_.contains(k); }

  const json& raw(const std::string& k) {
    seen_.insert(k);
    return j_.at(k);
  }

  double number(const std::string& k, double def) {
    if (!has(k)) return def;
    const json& v = raw(k);
    if (!v.is_number()) throw ConfigError(key(k), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(key(k), "must be finite");
    return d;
  }

  int integer(const std::string& k, int def) {
    if (!has(k)) return def;
    const json& v = raw(k);
    if (!v.is_number()) throw ConfigError(key(k), "expected an integer");
    const double d = v.get<double>();
    if (std::floor(d) != d || std::abs(d) > 2e9) throw ConfigError(key(k), "expected an integer");
    return static_cast<int>(d);
  }

  std::uint64_t uint64(const std::string& k, std::uint64_t def) {
    if (!has(k)) return def;
    const json& v = raw(k);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      throw ConfigError(key(k), "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& k, bool def) {
    if (!has(k)) return def;
    const json& v = raw(k);
    if (!v.is_boolean()) throw ConfigError(key(k), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& k, const std::string& def) {
    if (!has(k)) return def;
    const json& v = raw(k);
    if (!v.is_string()) throw ConfigError(key(k), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& k, std::vector<double> def) {
    if (!has(k)) return def;
    const json& v = raw(k);
    if (!v.is_array()) throw ConfigError(key(k), "expected an array of numbers");
    std::vector<double> out;
    for (const json& e : v) {
      if (!e.is_number()) throw ConfigError(key(k), "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  FitWindow window(const std::string& k, FitWindow def) {
    if (!has(k)) return def;
    const std::vector<double> v = numbers(k, {});
    if (v.size() != 2 || !(v[0] < v[1])) throw ConfigError(key(k), "expected [lo, hi] with lo < hi");
    return {v[0], v[1]};
  }

  GridSpec grid(const std::string& k, GridSpec def) {
    if (!has(k)) return def;
    const json& v = raw(k);
    if (v.is_array()) {
      GridSpec g = GridSpec::list(numbers(k, {}));
      if (g.values.empty()) throw ConfigError(key(k), "grid list is empty");
      return g;
    }
    Section s(v, key(k));
    if (!s.has("lo")) throw ConfigError(s.key("lo"), "missing");
    if (!s.has("hi")) throw ConfigError(s.key("hi"), "missing");
    if (!s.has("n")) throw ConfigError(s.key("n"), "missing");
    const double lo = s.number("lo", 0), hi = s.number("hi", 0);
    const int n = s.integer("n", 0);
    const std::string spacing = s.string("spacing", "log");
    s.finish();
    if (spacing != "log" && spacing != "linear")
      throw ConfigError(s.key("spacing"), "must be \"log\" or \"linear\"");
    if (n < 1) throw ConfigError(s.key("n"), "must be >= 1");
    if (n > 1 && !(lo < hi)) throw ConfigError(key(k), "need lo < hi");
    if (spacing == "log" && !(lo > 0)) throw ConfigError(s.key("lo"), "log spacing needs lo > 0");
    return GridSpec::range(lo, hi, n, spacing == "log");
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(key(it.key()), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json grid_json(const GridSpec& g) {
  if (g.is_list) return g.values;
  return json{{"lo", g.lo}, {"hi", g.hi}, {"n", g.n}, {"spacing", g.log ? "log" : "linear"}};
}

json window_json(const FitWindow& w) { return json::array({w.lo, w.hi}); }

}  // namespace

json CampaignConfig::to_json() const {
  json j;
  j["engine"] = to_string(engine);
  j["model"] = {{"S", model.spin}, {"U", model.U}, {"lambda", model.lambda},
                {"t_i", model.t_i}, {"t_f", model.t_f}};
  j["grid"] = {{"lambda_over_U", grid_json(lambda_over_U)}, {"S", spins}, {"t", grid_json(times)}};
  j["meanfield"] = {{"z0", meanfield.z0},
                    {"phi0", meanfield.phi0},
                    {"window", meanfield.window},
                    {"sample_dt", meanfield.sample_dt},
                    {"trajectory_lambda_over_U", meanfield.trajectory_lambdas}};
  j["noise"] = {{"z_mean", noise.z_mean},
                {"z_spread", noise.z_spread},
                {"law", noise.law == NoiseLaw::Gaussian ? "gaussian" : "uniform"},
                {"n_traj", noise.n_traj},
                {"max_rejections", noise.max_rejections}};
  j["lz"] = {{"Lambda", grid_json(lz.Lambda)}, {"theta", lz.theta}, {"T", lz.T}, {"lambda", lz.lambda}};
  j["fit"] = {{"input", fit.input},
              {"x", fit.x_column},
              {"y", fit.y_column},
              {"transform", fit.transform == FitTransform::None ? "none" : "one_plus_y"},
              {"envelope", fit.envelope},
              {"bins", fit.bins},
              {"envelope_window", window_json(fit.envelope_window)},
              {"adiabatic", window_json(fit.adiabatic)},
              {"intermediate", window_json(fit.intermediate)},
              {"diabatic", window_json(fit.diabatic)}};
  j["tolerances"] = {{"rel", tol.rel},
                     {"abs", tol.abs},
                     {"quantum_rel", quantum_tol.rel},
                     {"quantum_abs", quantum_tol.abs},
                     {"two_level_rel", two_level_tol.rel},
                     {"two_level_abs", two_level_tol.abs},
                     {"norm_checks", norm_checks},
                     {"norm_abort", norm_abort}};
  j["seed"] = seed;
  j["workers"] = workers;
  j["output"] = {{"dir", output.dir}, {"prefix", output.prefix}, {"dump_populations", output.dump_populations}};
  return j;
}

CampaignConfig CampaignConfig::from_json(const json& j) {
  CampaignConfig c;
  Section root(j, "");
  if (root.has("engine")) c.engine = engine_from_string(root.string("engine", ""));

  if (root.has("model")) {
    Section s(root.raw("model"), "model");
    if (s.has("S")) {
      const json& v = s.raw("S");
      if (!v.is_number()) throw ConfigError("model.S", "expected an integer");
      try {
        c.model.spin = checked_integer_spin(v.get<double>());
      } catch (const InvalidArgument& e) {
        throw ConfigError("model.S", e.what());
      }
    }
    c.model.U = s.number("U", c.model.U);
    c.model.lambda = s.number("lambda", c.model.lambda);
    c.model.t_i = s.number("t_i", c.model.t_i);
    c.model.t_f = s.number("t_f", c.model.t_f);
    s.finish();
  }

  if (root.has("grid")) {
    Section s(root.raw("grid"), "grid");
    c.lambda_over_U = s.grid("lambda_over_U", c.lambda_over_U);
    if (s.has("S")) {
      const json& v = s.raw("S");
      if (!v.is_array() || v.empty()) throw ConfigError("grid.S", "expected a non-empty array");
      c.spins.clear();
      for (const json& e : v) {
        if (!e.is_number()) throw ConfigError("grid.S", "expected integers");
        try {
          c.spins.push_back(checked_integer_spin(e.get<double>()));
        } catch (const InvalidArgument& err) {
          throw ConfigError("grid.S", err.what());
        }
      }
    }
    c.times = s.grid("t", c.times);
    s.finish();
    const bool sweeps_lambda =
        c.engine == Engine::MeanField || c.engine == Engine::Twa || c.engine == Engine::Quantum;
    if (sweeps_lambda && !s.has("lambda_over_U"))
      throw ConfigError("grid.lambda_over_U", "missing (required by the " + to_string(c.engine) +
                                                  " engine when a grid section is given)");
  }

  if (root.has("meanfield")) {
    Section s(root.raw("meanfield"), "meanfield");
    c.meanfield.z0 = s.number("z0", c.meanfield.z0);
    c.meanfield.phi0 = s.number("phi0", c.meanfield.phi0);
    c.meanfield.window = s.number("window", c.meanfield.window);
    c.meanfield.sample_dt = s.number("sample_dt", c.meanfield.sample_dt);
    c.meanfield.trajectory_lambdas = s.numbers("trajectory_lambda_over_U", c.meanfield.trajectory_lambdas);
    s.finish();
  }

  if (root.has("noise")) {
    Section s(root.raw("noise"), "noise");
    c.noise.z_mean = s.number("z_mean", c.noise.z_mean);
    c.noise.z_spread = s.number("z_spread", c.noise.z_spread);
    const std::string law = s.string("law", c.noise.law == NoiseLaw::Gaussian ? "gaussian" : "uniform");
    if (law == "gaussian")
      c.noise.law = NoiseLaw::Gaussian;
    else if (law == "uniform")
      c.noise.law = NoiseLaw::Uniform;
    else
      throw ConfigError("noise.law", "must be \"gaussian\" or \"uniform\"");
    c.noise.n_traj = s.integer("n_traj", c.noise.n_traj);
    c.noise.max_rejections = s.integer("max_rejections", c.noise.max_rejections);
    s.finish();
  }

  if (root.has("lz")) {
    Section s(root.raw("lz"), "lz");
    c.lz.Lambda = s.grid("Lambda", c.lz.Lambda);
    c.lz.theta = s.numbers("theta", c.lz.theta);
    c.lz.T = s.number("T", c.lz.T);
    c.lz.lambda = s.number("lambda", c.lz.lambda);
    s.finish();
  }

  if (root.has("fit")) {
    Section s(root.raw("fit"), "fit");
    c.fit.input = s.string("input", c.fit.input);
    c.fit.x_column = s.string("x", c.fit.x_column);
    c.fit.y_column = s.string("y", c.fit.y_column);
    const std::string tr = s.string("transform", c.fit.transform == FitTransform::None ? "none" : "one_plus_y");
    if (tr == "none")
      c.fit.transform = FitTransform::None;
    else if (tr == "one_plus_y")
      c.fit.transform = FitTransform::OnePlusY;
    else
      throw ConfigError("fit.transform", "must be \"none\" or \"one_plus_y\"");
    c.fit.envelope = s.boolean("envelope", c.fit.envelope);
    c.fit.bins = s.integer("bins", c.fit.bins);
    c.fit.envelope_window = s.window("envelope_window", c.fit.envelope_window);
    c.fit.adiabatic = s.window("adiabatic", c.fit.adiabatic);
    c.fit.intermediate = s.window("intermediate", c.fit.intermediate);
    c.fit.diabatic = s.window("diabatic", c.fit.diabatic);
    s.finish();
  }

  if (root.has("tolerances")) {
    Section s(root.raw("tolerances"), "tolerances");
    c.tol.rel = s.number("rel", c.tol.rel);
    c.tol.abs = s.number("abs", c.tol.abs);
    c.quantum_tol.rel = s.number("quantum_rel", c.quantum_tol.rel);
    c.quantum_tol.abs = s.number("quantum_abs", c.quantum_tol.abs);
    c.two_level_tol.rel = s.number("two_level_rel", c.two_level_tol.rel);
    c.two_level_tol.abs = s.number("two_level_abs", c.two_level_tol.abs);
    c.norm_checks = s.integer("norm_checks", c.norm_checks);
    c.norm_abort = s.number("norm_abort", c.norm_abort);
    s.finish();
  }

  c.seed = root.uint64("seed", c.seed);
  c.workers = root.integer("workers", c.workers);

  if (root.has("output")) {
    Section s(root.raw("output"), "output");
    c.output.dir = s.string("dir", c.output.dir);
    c.output.prefix = s.string("prefix", c.output.prefix);
    c.output.dump_populations = s.boolean("dump_populations", c.output.dump_populations);
    s.finish();
  }
  root.finish();
  return c;
}

std::string CampaignConfig::digest() const {
  json j = to_json();
  j.erase("workers");
  j.erase("output");
  return fnv1a_hex(j.dump());
}

std::vector<std::string> CampaignConfig::check() const {
  std::vector<std::string> warnings;
  auto positive = [](double v, const char* key) {
    if (!(v > 0.0)) throw ConfigError(key, "must be > 0");
  };
  try {
    model.validate_operator_params();
  } catch (const InvalidArgument& e) {
    throw ConfigError("model", e.what());
  }
  if (!(model.t_i < model.t_f)) throw ConfigError("model.t_f", "must exceed model.t_i");
  if (workers < 1) throw ConfigError("workers", "must be >= 1");
  positive(tol.rel, "tolerances.rel");
  positive(tol.abs, "tolerances.abs");
  positive(quantum_tol.rel, "tolerances.quantum_rel");
  positive(quantum_tol.abs, "tolerances.quantum_abs");
  positive(two_level_tol.rel, "tolerances.two_level_rel");
  positive(two_level_tol.abs, "tolerances.two_level_abs");
  positive(norm_abort, "tolerances.norm_abort");
  if (norm_checks < 1) throw ConfigError("tolerances.norm_checks", "must be >= 1");

  const bool sweeps_lambda = engine == Engine::MeanField || engine == Engine::Twa || engine == Engine::Quantum;
  if (sweeps_lambda) {
    if (!(model.U > 0.0)) throw ConfigError("model.U", "sweep campaigns need U > 0");
    const std::vector<double> grid = lambda_over_U.resolve();
    if (grid.empty()) throw ConfigError("grid.lambda_over_U", "grid is empty");
    int inside = 0;
    for (double r : grid) {
      if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("grid.lambda_over_U", "values must be finite and > 0");
      if (r * model.U * model.t_f < 2.0 * model.U) ++inside;
    }
    if (inside > 0) {
      std::ostringstream w;
      w << inside << " of " << grid.size()
        << " grid points have lambda * t_f < 2U: the final time sits inside the critical region";
      warnings.push_back(w.str());
    }
    if (model.t_i * grid.front() * model.U > -2.0 * model.U && model.t_i < 0.0) {
      std::ostringstream w;
      w << "lambda * |t_i| < 2U for part of the grid: the initial time sits inside the critical region";
      warnings.push_back(w.str());
    }
  }
  if (engine == Engine::MeanField || engine == Engine::Twa) {
    if (!(meanfield.z0 >= -1.0 && meanfield.z0 <= 1.0)) throw ConfigError("meanfield.z0", "must lie in [-1, 1]");
    positive(meanfield.window, "meanfield.window");
    positive(meanfield.sample_dt, "meanfield.sample_dt");
    if (meanfield.window > model.t_f - model.t_i)
      throw ConfigError("meanfield.window", "longer than the sweep");
  }
  if (engine == Engine::Twa) {
    try {
      noise.validate();
    } catch (const InvalidArgument& e) {
      throw ConfigError("noise", e.what());
    }
  }
  if (engine == Engine::Lz) {
    positive(lz.T, "lz.T");
    positive(lz.lambda, "lz.lambda");
    for (double L : lz.Lambda.resolve())
      if (!(L > 0.0)) throw ConfigError("lz.Lambda", "values must be > 0");
    if (lz.theta.empty()) throw ConfigError("lz.theta", "empty");
  }
  if (engine == Engine::Fit) {
    if (fit.input.empty()) throw ConfigError("fit.input", "missing (path of a sweep CSV)");
    if (fit.bins < 1) throw ConfigError("fit.bins", "must be >= 1");
  }
  if (engine == Engine::Spectrum && times.resolve().empty()) throw ConfigError("grid.t", "grid is empty");
  return warnings;
}

CampaignConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("<file>", "cannot read " + path.string());
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("parse error: ") + e.what());
  }
  return CampaignConfig::from_json(j);
}

ValidationReport validate_config(const std::filesystem::path& path) {
  ValidationReport r;
  r.config = load_config(path);
  r.warnings = r.config.check();
  r.resolved = r.config.to_json().dump(2);
  return r;
}

namespace {

struct Context {
  const CampaignConfig& cfg;
  std::filesystem::path dir;
  std::string prefix;
  std::string digest;
  CampaignResult result;

  CsvWriter writer(std::vector<std::string> columns) const {
    CsvWriter w(std::move(columns));
    w.comment(std::string("lzlmg ") + version());
    w.comment("engine: " + to_string(cfg.engine));
    w.comment("config_digest: " + digest);
    w.comment("seed: " + std::to_string(cfg.seed));
    return w;
  }

  void save(const CsvWriter& w, const std::string& name) {
    const auto path = dir / name;
    w.save(path);
    result.files.push_back(path);
  }
};

json fit_json(const std::string& quantity, const FitResult& f) {
  return {{"quantity", quantity},           {"model", to_string(f.model)},
          {"window_lo", f.window_lo},       {"window_hi", f.window_hi},
          {"exponent_or_rate", f.exponent}, {"prefactor", f.prefactor},
          {"residual", f.residual},         {"n_points", f.n_points}};
}

// Runs a fit, recording either its result or the reason it failed.
template <class Fn>
void try_fit(json& fits, CsvWriter* table, const std::string& quantity, Fn&& fn) {
  try {
    const FitResult f = fn();
    fits.push_back(fit_json(quantity, f));
    if (table) table->row() << quantity << f.window_lo << f.window_hi << f.exponent << f.prefactor << f.residual << f.n_points;
  } catch (const Error& e) {
    fits.push_back({{"quantity", quantity}, {"error", e.what()}});
  }
}

CsvWriter fit_table(const Context& ctx) {
  return ctx.writer({"quantity", "window_lo", "window_hi", "exponent_or_rate", "prefactor", "residual", "n_points"});
}

std::vector<XY> transformed(std::vector<XY> pts, FitTransform t) {
  if (t == FitTransform::OnePlusY)
    for (XY& p : pts) p.y = 1.0 + p.y;
  return pts;
}

void envelope_fits(json& fits, CsvWriter& table, const FitConfig& fc, const std::vector<XY>& raw,
                   const std::string& name) {
  const std::vector<XY> pts = transformed(raw, fc.transform);
  const std::string label = fc.transform == FitTransform::OnePlusY ? "1+" + name : name;
  try_fit(fits, &table, label + "_envelope", [&] {
    std::vector<XY> sel;
    for (const XY& p : pts)
      if (fc.envelope_window.contains(p.x)) sel.push_back(p);
    const std::vector<XY> env =
        lower_envelope(sel, fc.bins, fc.envelope_window.lo, fc.envelope_window.hi);
    return fit_power_law(env);
  });
}

void run_spectrum(Context& ctx) {
  const CampaignConfig& c = ctx.cfg;
  const std::vector<double> times = c.times.resolve();
  std::vector<std::optional<SpectrumSlice>> slices(times.size());
  std::vector<std::string> errors(times.size());
  parallel_for(times.size(), c.workers, [&](std::size_t k) {
    try {
      slices[k] = spectrum_at(c.model, times[k]);
    } catch (const Error& e) {
      errors[k] = e.what();
    }
  });
  CsvWriter w = ctx.writer({"t", "n", "epsilon_n", "parity"});
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!slices[k]) {
      ctx.result.failures.push_back("t = " + format_double(times[k]) + ": " + errors[k]);
      continue;
    }
    const SpectrumSlice& s = *slices[k];
    for (Eigen::Index n = 0; n < s.energies.size(); ++n)
      w.row() << s.t << static_cast<int>(n) << s.energies[n] << s.parity[static_cast<std::size_t>(n)];
  }
  ctx.result.n_points = times.size();
  ctx.save(w, ctx.prefix + ".csv");
}

void run_meanfield(Context& ctx) {
  const CampaignConfig& c = ctx.cfg;
  const std::vector<double> ratios = c.lambda_over_U.resolve();
  const BlochState init = BlochState::from_z(c.meanfield.z0, c.meanfield.phi0);
  MeanFieldOptions opts;
  opts.tol = c.tol;
  opts.sample_dt = c.meanfield.sample_dt;

  std::vector<std::optional<MeanFieldPoint>> pts(ratios.size());
  std::vector<std::string> errors(ratios.size());
  parallel_for(ratios.size(), c.workers, [&](std::size_t k) {
    const double lam = ratios[k] * c.model.U;
    try {
      pts[k] = meanfield_sweep(c.model, init, std::span(&lam, 1), opts, c.meanfield.window, 1).front();
    } catch (const Error& e) {
      errors[k] = e.what();
    }
  });

  CsvWriter w = ctx.writer({"lambda_over_U", "z_final", "n_steps", "energy_drift_diag"});
  std::vector<XY> xy;
  for (std::size_t k = 0; k < ratios.size(); ++k) {
    if (!pts[k]) {
      ctx.result.failures.push_back("lambda_over_U = " + format_double(ratios[k]) + ": " + errors[k]);
      continue;
    }
    w.row() << ratios[k] << pts[k]->z_final << pts[k]->n_steps << pts[k]->energy_drift_diag;
    xy.push_back({ratios[k], pts[k]->z_final});
  }
  ctx.result.n_points = ratios.size();
  ctx.save(w, ctx.prefix + ".csv");

  for (double r : c.meanfield.trajectory_lambdas) {
    ModelParams q = c.model;
    q.lambda = r * c.model.U;
    try {
      const TrajectoryRecord tr = integrate_meanfield(q, init, opts);
      CsvWriter tw = ctx.writer({"t", "theta", "phi", "z", "H_cl"});
      tw.comment("lambda_over_U: " + format_double(r));
      for (std::size_t k = 0; k < tr.t.size(); ++k)
        tw.row() << tr.t[k] << tr.states[k].theta << tr.states[k].phi << tr.states[k].z() << tr.energy[k];
      ctx.save(tw, ctx.prefix + "_trajectory_" + format_double(r) + ".csv");
    } catch (const Error& e) {
      ctx.result.failures.push_back("trajectory lambda_over_U = " + format_double(r) + ": " + e.what());
    }
  }

  json fits = json::array();
  CsvWriter table = fit_table(ctx);
  if (c.fit.envelope) envelope_fits(fits, table, c.fit, xy, "z_final");
  ctx.result.summary["fits"] = fits;
  ctx.save(table, ctx.prefix + "_fits.csv");
}

void run_twa(Context& ctx) {
  const CampaignConfig& c = ctx.cfg;
  const std::vector<double> ratios = c.lambda_over_U.resolve();
  NoiseModel nm = c.noise;
  nm.seed = c.seed;
  MeanFieldOptions opts;
  opts.tol = c.tol;
  opts.sample_dt = c.meanfield.sample_dt;

  CsvWriter w = ctx.writer({"lambda_over_U", "z_final_mean", "z_final_stderr", "n_traj", "seed"});
  w.comment("noise: z_mean " + format_double(nm.z_mean) + ", z_spread " + format_double(nm.z_spread) + ", law " +
            (nm.law == NoiseLaw::Gaussian ? "gaussian" : "uniform"));
  for (double r : ratios) {
    const double lam = r * c.model.U;
    try {
      const TwaPoint p = twa_sweep(c.model, nm, std::span(&lam, 1), opts, c.meanfield.window, c.workers).front();
      w.row() << r << p.z_final_mean << p.z_final_stderr << p.n_traj << p.seed;
    } catch (const Error& e) {
      ctx.result.failures.push_back("lambda_over_U = " + format_double(r) + ": " + e.what());
    }
  }
  ctx.result.n_points = ratios.size();
  ctx.save(w, ctx.prefix + ".csv");
}

void run_quantum(Context& ctx) {
  const CampaignConfig& c = ctx.cfg;
  const std::vector<double> ratios = c.lambda_over_U.resolve();
  std::vector<double> lambdas;
  for (double r : ratios) lambdas.push_back(r * c.model.U);
  QuantumOptions opts;
  opts.tol = c.quantum_tol;
  opts.norm_checks = c.norm_checks;
  opts.norm_abort = c.norm_abort;

  const std::vector<QuantumPoint> pts = quantum_sweep(c.model, c.spins, lambdas, opts, c.workers);
  const std::vector<std::string> cols{"S", "lambda", "P_ex", "Q", "Sz_final", "norm_drift", "parity_drift"};
  CsvWriter merged = ctx.writer(cols);
  CsvWriter pops = ctx.writer({"S", "lambda", "n", "P_n"});
  std::map<int, CsvWriter> per_s;
  std::map<int, std::vector<XY>> pex_by_s;
  std::map<std::size_t, std::vector<SScalingPoint>> by_lambda;

  for (std::size_t k = 0; k < pts.size(); ++k) {
    const QuantumPoint& p = pts[k];
    if (!p.ok) {
      ctx.result.failures.push_back("S = " + std::to_string(p.spin) + ", lambda = " + format_double(p.lambda) + ": " +
                                    p.error);
      continue;
    }
    auto it = per_s.find(p.spin);
    if (it == per_s.end()) it = per_s.emplace(p.spin, ctx.writer(cols)).first;
    for (CsvWriter* w : {&merged, &it->second})
      w->row() << p.spin << p.lambda << p.report.P_ex << p.report.mandel_Q << p.report.Sz << p.norm_drift
               << p.parity_drift;
    if (c.output.dump_populations)
      for (std::size_t n = 0; n < p.report.populations.size(); ++n)
        pops.row() << p.spin << p.lambda << static_cast<int>(n) << p.report.populations[n];
    pex_by_s[p.spin].push_back({p.lambda / c.model.U, p.report.P_ex});
    by_lambda[k % lambdas.size()].push_back({p.spin, p.report.P_ex, p.report.mandel_Q});
  }
  ctx.result.n_points = pts.size();
  for (const auto& [s, w] : per_s) ctx.save(w, ctx.prefix + "_S" + std::to_string(s) + ".csv");
  ctx.save(merged, ctx.prefix + "_summary.csv");
  if (c.output.dump_populations) ctx.save(pops, ctx.prefix + "_populations.csv");

  json fits = json::array();
  CsvWriter table = fit_table(ctx);
  for (const auto& [s, xy] : pex_by_s) {
    const std::string tag = "S" + std::to_string(s) + "_P_ex_";
    try_fit(fits, &table, tag + "adiabatic", [&] { return fit_power_law(xy, c.fit.adiabatic); });
    try_fit(fits, &table, tag + "intermediate", [&] { return fit_power_law(xy, c.fit.intermediate); });
    try_fit(fits, &table, tag + "diabatic", [&] { return fit_exponential_saturation(xy, c.fit.diabatic); });
  }
  for (const auto& [li, group] : by_lambda) {
    const double r = ratios[li];
    if (!c.fit.intermediate.contains(r)) continue;
    const std::string tag = "lambda_over_U=" + format_double(r) + "_";
    try {
      const SScaling sc = scaling_with_S(group);
      fits.push_back(fit_json(tag + "P_ex_vs_S", sc.P_ex));
      fits.push_back(fit_json(tag + "Q_vs_S", sc.Q));
      fits.back()["Q_over_P_ex_exponent"] = sc.ratio_exponent;
      table.row() << tag + "P_ex_vs_S" << sc.P_ex.window_lo << sc.P_ex.window_hi << sc.P_ex.exponent
                  << sc.P_ex.prefactor << sc.P_ex.residual << sc.P_ex.n_points;
      table.row() << tag + "Q_vs_S" << sc.Q.window_lo << sc.Q.window_hi << sc.Q.exponent << sc.Q.prefactor
                  << sc.Q.residual << sc.Q.n_points;
    } catch (const Error& e) {
      fits.push_back({{"quantity", tag + "S_scaling"}, {"error", e.what()}});
    }
  }
  ctx.result.summary["fits"] = fits;
  ctx.save(table, ctx.prefix + "_fits.csv");
}

void run_lz(Context& ctx) {
  const CampaignConfig& c = ctx.cfg;
  const std::vector<double> Ls = c.lz.Lambda.resolve();
  const std::size_t nt = c.lz.theta.size();
  struct Row {
    double analytic = 0.0, numerical = 0.0;
    std::string error;
  };
  std::vector<Row> rows(Ls.size() * nt);
  parallel_for(rows.size(), c.workers, [&](std::size_t k) {
    const double L = Ls[k / nt], th = c.lz.theta[k % nt];
    try {
      const LZParams p = LZParams::from_adiabaticity(L, c.lz.lambda, c.lz.T);
      rows[k].analytic = interference_probability(p, th);
      rows[k].numerical = std::norm(integrate_two_level(p, TwoLevelState::from_mixing_angle(th), c.two_level_tol).state.c1);
    } catch (const Error& e) {
      rows[k].error = e.what();
    }
  });
  CsvWriter w = ctx.writer({"Lambda", "theta", "T", "P1_analytic", "P1_numerical"});
  w.comment("lambda: " + format_double(c.lz.lambda));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const double L = Ls[k / nt], th = c.lz.theta[k % nt];
    if (!rows[k].error.empty()) {
      ctx.result.failures.push_back("Lambda = " + format_double(L) + ", theta = " + format_double(th) + ": " +
                                    rows[k].error);
      continue;
    }
    w.row() << L << th << c.lz.T << rows[k].analytic << rows[k].numerical;
  }
  ctx.result.n_points = rows.size();
  ctx.save(w, ctx.prefix + ".csv");
}

void run_fit(Context& ctx) {
  const CampaignConfig& c = ctx.cfg;
  const CsvTable t = read_csv(c.fit.input);
  std::vector<double> xs, ys;
  try {
    xs = t.numeric(c.fit.x_column);
    ys = t.numeric(c.fit.y_column);
  } catch (const Error& e) {
    throw ConfigError("fit.x", e.what());
  }
  std::map<std::string, std::vector<XY>> groups;
  const bool grouped = std::find(t.columns.begin(), t.columns.end(), "S") != t.columns.end() && c.fit.x_column != "S";
  const std::size_t sc = grouped ? t.column("S") : 0;
  for (std::size_t k = 0; k < xs.size(); ++k) groups[grouped ? "S" + t.rows[k][sc] + "_" : ""].push_back({xs[k], ys[k]});

  json fits = json::array();
  CsvWriter table = fit_table(ctx);
  table.comment("input: " + c.fit.input);
  for (const auto& [tag, raw] : groups) {
    const std::vector<XY> pts = transformed(raw, c.fit.transform);
    const std::string name = tag + (c.fit.transform == FitTransform::OnePlusY ? "1+" : "") + c.fit.y_column;
    if (c.fit.envelope) {
      envelope_fits(fits, table, c.fit, raw, tag + c.fit.y_column);
      continue;
    }
    try_fit(fits, &table, name + "_adiabatic", [&] { return fit_power_law(pts, c.fit.adiabatic); });
    try_fit(fits, &table, name + "_intermediate", [&] { return fit_power_law(pts, c.fit.intermediate); });
    try_fit(fits, &table, name + "_diabatic", [&] { return fit_exponential_saturation(pts, c.fit.diabatic); });
  }
  for (const json& f : fits)
    if (f.contains("error"))
      ctx.result.failures.push_back(f["quantity"].get<std::string>() + ": " + f["error"].get<std::string>());
  ctx.result.n_points = xs.size();
  ctx.result.summary["fits"] = fits;
  ctx.save(table, ctx.prefix + ".csv");
}

}  // namespace

CampaignResult run_campaign(const CampaignConfig& cfg) {
  const std::vector<std::string> warnings = cfg.check();
  for (const auto& w : warnings) warn(w);

  Context ctx{cfg, cfg.output.dir, cfg.output.prefix.empty() ? to_string(cfg.engine) : cfg.output.prefix,
              cfg.digest(), {}};
  std::filesystem::create_directories(ctx.dir);
  ctx.result.summary = json::object();

  switch (cfg.engine) {
    case Engine::Spectrum: run_spectrum(ctx); break;
    case Engine::MeanField: run_meanfield(ctx); break;
    case Engine::Twa: run_twa(ctx); break;
    case Engine::Quantum: run_quantum(ctx); break;
    case Engine::Lz: run_lz(ctx); break;
    case Engine::Fit: run_fit(ctx); break;
  }

  json& s = ctx.result.summary;
  s["version"] = version();
  s["engine"] = to_string(cfg.engine);
  s["config_digest"] = ctx.digest;
  s["config"] = cfg.to_json();
  s["config"].erase("workers");
  s["config"]["output"].erase("dir");
  s["n_points"] = ctx.result.n_points;
  s["failures"] = ctx.result.failures;
  s["warnings"] = warnings;
  if (!s.contains("fits")) s["fits"] = json::array();
  json files = json::array();
  for (const auto& f : ctx.result.files) files.push_back(f.filename().string());
  s["files"] = files;

  const auto path = ctx.dir / (ctx.prefix + "_summary.json");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << s.dump(2) << '\n';
  ctx.result.files.push_back(path);
  return ctx.result;
}

}  // namespace lzlmg
