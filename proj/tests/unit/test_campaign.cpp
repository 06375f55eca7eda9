#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lzlmg/campaign.hpp"
#include "lzlmg/csv.hpp"
#include "lzlmg/diagnostics.hpp"

using namespace lzlmg;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lzlmg_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string config_error_key(const json& j) {
  try {
    CampaignConfig::from_json(j).check();
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

struct Quiet {
  WarningSink prev = set_warning_sink([](const std::string&) {});
  ~Quiet() { set_warning_sink(prev); }
};

}  // namespace

TEST(Csv, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.98})
    EXPECT_EQ(std::stod(format_double(v)), v);
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(std::nan("")), "nan");
}

TEST(Csv, WriteRead) {
  const fs::path dir = scratch("csv");
  CsvWriter w({"a", "b"});
  w.comment("hello");
  w.row() << 1.5 << 2;
  w.row() << 0.1 << 7L;
  w.save(dir / "t.csv");
  const CsvTable t = read_csv(dir / "t.csv");
  EXPECT_EQ(t.comments, std::vector<std::string>{"hello"});
  EXPECT_EQ(t.columns, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(t.numeric("a"), (std::vector<double>{1.5, 0.1}));
  EXPECT_THROW(t.column("c"), Error);
  EXPECT_TRUE(slurp(dir / "t.csv").starts_with("# hello\na,b\n"));
}

TEST(Csv, RowWidthChecked) {
  CsvWriter w({"a", "b"});
  w.row() << 1.0;
  EXPECT_THROW(w.str(), Error);
}

TEST(Digest, Fnv1aKnownValues) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Config, RoundTripLossless) {
  CampaignConfig c;
  c.engine = Engine::Quantum;
  c.model.spin = 7;
  c.model.U = 0.1 + 0.2;
  c.lambda_over_U = GridSpec::list({0.1, 1.0 / 3.0});
  c.spins = {3, 9};
  c.noise.law = NoiseLaw::Uniform;
  c.fit.transform = FitTransform::None;
  c.seed = 18446744073709551615ull;
  c.output.dump_populations = true;
  const json j = c.to_json();
  const CampaignConfig back = CampaignConfig::from_json(json::parse(j.dump()));
  EXPECT_EQ(back.to_json(), j);
  EXPECT_EQ(back.digest(), c.digest());
  EXPECT_EQ(back.seed, c.seed);
  EXPECT_EQ(back.model.U, c.model.U);
}

TEST(Config, DefaultsEncodeReferenceSetup) {
  const CampaignConfig c = CampaignConfig::from_json(json::object());
  EXPECT_EQ(c.model.t_i, -200.0);
  EXPECT_EQ(c.model.t_f, 200.0);
  EXPECT_EQ(c.meanfield.z0, 0.98);
  EXPECT_EQ(c.meanfield.phi0, 0.0);
  const auto grid = c.lambda_over_U.resolve();
  EXPECT_EQ(grid.size(), 400u);
  EXPECT_EQ(grid.front(), 0.02);
  EXPECT_EQ(grid.back(), 10.0);
}

TEST(Config, DigestIgnoresWorkersAndOutput) {
  CampaignConfig a, b;
  b.workers = 8;
  b.output.dir = "/elsewhere";
  EXPECT_EQ(a.digest(), b.digest());
  b.seed = 1;
  EXPECT_NE(a.digest(), b.digest());
}

TEST(Config, ErrorsNameTheKey) {
  EXPECT_EQ(config_error_key({{"modle", json::object()}}), "modle");
  EXPECT_EQ(config_error_key({{"model", {{"S", 2.5}}}}), "model.S");
  EXPECT_EQ(config_error_key({{"model", {{"lamda", 1}}}}), "model.lamda");
  EXPECT_EQ(config_error_key({{"grid", {{"S", {5, 12}}}}}), "grid.lambda_over_U");
  EXPECT_EQ(config_error_key({{"grid", {{"lambda_over_U", {{"lo", 0.1}, {"n", 3}}}}}}), "grid.lambda_over_U.hi");
  EXPECT_EQ(config_error_key({{"grid", {{"S", {3, 4.5}}, {"lambda_over_U", {1}}}}}), "grid.S");
  EXPECT_EQ(config_error_key({{"engine", "plot"}}), "engine");
  EXPECT_EQ(config_error_key({{"noise", {{"law", "cauchy"}}}}), "noise.law");
  EXPECT_EQ(config_error_key({{"workers", 0}}), "workers");
  EXPECT_EQ(config_error_key({{"seed", -1}}), "seed");
  EXPECT_EQ(config_error_key({{"engine", "fit"}}), "fit.input");
  EXPECT_EQ(config_error_key({{"model", {{"U", 0.0}}}}), "model.U");
  EXPECT_EQ(config_error_key(json::object()), "");
}

TEST(Config, WarnsWhenFinalTimeIsCritical) {
  CampaignConfig c;
  c.model.t_f = 1.0;
  c.lambda_over_U = GridSpec::list({0.5, 5.0});
  const auto w = c.check();
  ASSERT_FALSE(w.empty());
  EXPECT_NE(w[0].find("critical region"), std::string::npos);
}

TEST(Config, ValidateFileReportsResolvedDefaults) {
  const fs::path dir = scratch("validate");
  std::ofstream(dir / "c.json") << R"({"engine": "twa", "noise": {"n_traj": 10}})";
  const ValidationReport r = validate_config(dir / "c.json");
  EXPECT_EQ(r.config.engine, Engine::Twa);
  EXPECT_NE(r.resolved.find("\"z_spread\": 0.05"), std::string::npos);
  std::ofstream(dir / "bad.json") << "{ not json";
  EXPECT_THROW(validate_config(dir / "bad.json"), ConfigError);
}

TEST(Campaign, MeanfieldDeterministicAcrossWorkers) {
  Quiet q;
  CampaignConfig c;
  c.engine = Engine::MeanField;
  c.lambda_over_U = GridSpec::range(0.05, 2.0, 6, true);
  c.fit.envelope_window = {0.05, 2.0};
  c.fit.bins = 3;
  c.output.dir = scratch("mf1").string();
  const CampaignResult a = run_campaign(c);
  c.workers = 3;
  c.output.dir = scratch("mf3").string();
  const CampaignResult b = run_campaign(c);
  EXPECT_FALSE(a.partial());
  ASSERT_EQ(a.files.size(), b.files.size());
  for (std::size_t k = 0; k < a.files.size(); ++k) EXPECT_EQ(slurp(a.files[k]), slurp(b.files[k])) << a.files[k];

  const CsvTable t = read_csv(a.files[0]);
  EXPECT_EQ(t.columns, (std::vector<std::string>{"lambda_over_U", "z_final", "n_steps", "energy_drift_diag"}));
  EXPECT_EQ(t.rows.size(), 6u);
  bool has_digest = false, has_version = false;
  for (const auto& line : t.comments) {
    has_digest = has_digest || line == "config_digest: " + c.digest();
    has_version = has_version || line == std::string("lzlmg ") + version();
  }
  EXPECT_TRUE(has_digest);
  EXPECT_TRUE(has_version);
  EXPECT_EQ(a.summary["config_digest"], c.digest());
  EXPECT_TRUE(a.summary["fits"].is_array());
}

TEST(Campaign, QuantumWritesPerSpinFilesAndSummary) {
  Quiet q;
  CampaignConfig c;
  c.engine = Engine::Quantum;
  c.spins = {2, 3, 4};
  c.lambda_over_U = GridSpec::list({0.5, 1.0});
  c.output.dir = scratch("q").string();
  c.output.dump_populations = true;
  const CampaignResult r = run_campaign(c);
  EXPECT_FALSE(r.partial());
  for (const char* f : {"quantum_S2.csv", "quantum_S3.csv", "quantum_S4.csv", "quantum_summary.csv",
                        "quantum_populations.csv", "quantum_fits.csv", "quantum_summary.json"})
    EXPECT_TRUE(fs::exists(fs::path(c.output.dir) / f)) << f;
  const CsvTable t = read_csv(fs::path(c.output.dir) / "quantum_summary.csv");
  EXPECT_EQ(t.columns,
            (std::vector<std::string>{"S", "lambda", "P_ex", "Q", "Sz_final", "norm_drift", "parity_drift"}));
  EXPECT_EQ(t.rows.size(), 6u);
  const CsvTable pn = read_csv(fs::path(c.output.dir) / "quantum_populations.csv");
  EXPECT_EQ(pn.rows.size(), 2u * (5 + 7 + 9));
  const json s = json::parse(slurp(fs::path(c.output.dir) / "quantum_summary.json"));
  EXPECT_EQ(s["engine"], "quantum");
  EXPECT_EQ(s["n_points"], 6);
}

TEST(Campaign, QuantumPartialFailureListed) {
  Quiet q;
  CampaignConfig c;
  c.engine = Engine::Quantum;
  c.spins = {3};
  c.lambda_over_U = GridSpec::list({1.0});
  c.quantum_tol = {1e-3, 1e-3};
  c.norm_abort = 1e-14;
  c.output.dir = scratch("qfail").string();
  const CampaignResult r = run_campaign(c);
  EXPECT_TRUE(r.partial());
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_NE(r.failures[0].find("S = 3"), std::string::npos);
}

TEST(Campaign, TwaAndLzAndSpectrumColumns) {
  Quiet q;
  CampaignConfig c;
  c.output.dir = scratch("misc").string();
  c.engine = Engine::Twa;
  c.noise.n_traj = 4;
  c.seed = 5;
  c.lambda_over_U = GridSpec::list({0.5});
  run_campaign(c);
  const CsvTable twa = read_csv(fs::path(c.output.dir) / "twa.csv");
  EXPECT_EQ(twa.columns,
            (std::vector<std::string>{"lambda_over_U", "z_final_mean", "z_final_stderr", "n_traj", "seed"}));
  EXPECT_EQ(twa.rows[0][4], "5");

  c.engine = Engine::Lz;
  c.lz.Lambda = GridSpec::list({1.0});
  c.lz.theta = {0.0};
  run_campaign(c);
  const CsvTable lz = read_csv(fs::path(c.output.dir) / "lz.csv");
  EXPECT_EQ(lz.columns, (std::vector<std::string>{"Lambda", "theta", "T", "P1_analytic", "P1_numerical"}));

  c.engine = Engine::Spectrum;
  c.model.spin = 2;
  c.times = GridSpec::list({-1.0, 1.0});
  run_campaign(c);
  const CsvTable sp = read_csv(fs::path(c.output.dir) / "spectrum.csv");
  EXPECT_EQ(sp.columns, (std::vector<std::string>{"t", "n", "epsilon_n", "parity"}));
  EXPECT_EQ(sp.rows.size(), 10u);
}

TEST(Campaign, FitEngineReadsSweepCsv) {
  Quiet q;
  const fs::path dir = scratch("fit");
  CsvWriter w({"lambda_over_U", "z_final"});
  for (int k = 0; k < 50; ++k) {
    const double x = 0.02 * std::pow(25.0, k / 49.0);
    w.row() << x << (-1.0 + 0.3 * std::sqrt(x));
  }
  w.save(dir / "in.csv");
  CampaignConfig c;
  c.engine = Engine::Fit;
  c.fit.input = (dir / "in.csv").string();
  c.fit.bins = 10;
  c.output.dir = dir.string();
  const CampaignResult r = run_campaign(c);
  EXPECT_FALSE(r.partial());
  const CsvTable t = read_csv(dir / "fit.csv");
  EXPECT_EQ(t.columns, (std::vector<std::string>{"quantity", "window_lo", "window_hi", "exponent_or_rate",
                                                 "prefactor", "residual", "n_points"}));
  EXPECT_NEAR(t.numeric("exponent_or_rate")[0], 0.5, 1e-10);
}
