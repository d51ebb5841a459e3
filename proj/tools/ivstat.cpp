// ivstat: command-line front end for interval-valued data analysis.
//
// Exit codes: 0 success, 2 input or flag error, 3 numerical failure.
// Test outcomes never change the exit code.

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "ivstat/ivstat.hpp"

namespace {

using ivstat::InputError;
using nlohmann::json;

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ivstat::IntervalDataset load_dataset(const std::string& path) { return ivstat::parse_dataset(read_file(path)); }

void check_format(const std::string& out, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (out == a) return;
  throw InputError("unsupported output format '" + out + "'");
}

std::string fmt(double x, int precision = 7) {
  std::ostringstream os;
  os << std::setprecision(precision) << x;
  return os.str();
}

std::string matrix_text(const ivstat::Matrix& m, const std::string& indent) {
  std::ostringstream os;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    os << indent;
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << std::setw(14) << fmt(m(i, j));
    os << "\n";
  }
  return os.str();
}

// ---- describe ----

struct DescribeArgs {
  std::string file;
  std::string out = "json";
};

void cmd_describe(const DescribeArgs& args) {
  check_format(args.out, {"json", "text"});
  const auto data = load_dataset(args.file);
  const auto rep = ivstat::describe_dataset(data);
  if (args.out == "json") {
    json doc = ivstat::to_json(rep);
    doc["n"] = data.n();
    doc["p"] = data.p();
    std::cout << doc.dump(2) << "\n";
    return;
  }
  std::cout << "n = " << data.n() << ", p = " << data.p() << "\n";
  std::cout << std::left << std::setw(10) << "Variable" << std::setw(16) << "Mean" << "Variance\n";
  for (std::size_t j = 0; j < rep.names.size(); ++j)
    std::cout << std::setw(10) << rep.names[j] << std::setw(16) << fmt(rep.variables[j].mean)
              << fmt(rep.variables[j].variance) << "\n";
  std::cout << "Covariance matrix:\n" << matrix_text(rep.covariance, "  ");
}

// ---- estimate ----

struct EstimateArgs {
  std::string file;
  double df = 0.0;
  std::string method = "both";
  std::optional<double> ci;
  std::string out = "json";
};

void cmd_estimate(const EstimateArgs& args) {
  check_format(args.out, {"json", "text"});
  const auto data = load_dataset(args.file);
  const auto reps = ivstat::to_internal(data);
  const auto stats = ivstat::sufficient_stats(reps);

  std::vector<ivstat::ParamEstimate> estimates;
  if (args.method == "ml" || args.method == "both") estimates.push_back(ivstat::ml_estimate(stats, args.df));
  if (args.method == "bayes" || args.method == "both") estimates.push_back(ivstat::bayes_estimate(stats, args.df));

  json doc = {{"n", data.n()}, {"p", data.p()}, {"wishart_df", args.df}, {"estimates", json::array()}};
  std::ostringstream text;
  text << "n = " << data.n() << ", p = " << data.p() << ", Wishart df m = " << fmt(args.df) << "\n";
  for (const auto& e : estimates) {
    json entry = ivstat::to_json(e);
    text << "\n" << ivstat::to_string(e.method) << " estimation\n";
    text << "  mu:\n" << matrix_text(e.mu_hat.transpose(), "  ");
    text << "  Sigma:\n" << matrix_text(e.sigma_hat, "  ");
    text << "  Lambda:\n" << matrix_text(e.lambda_hat, "  ");
    if (args.ci) {
      const auto cis = ivstat::asymptotic_ci(e, stats, *args.ci);
      entry["ci"] = {{"level", *args.ci}, {"intervals", ivstat::to_json(cis)}};
      text << "  Wald " << fmt(100.0 * *args.ci) << "% intervals:\n";
      for (const auto& c : cis)
        text << "    " << std::left << std::setw(10) << c.parameter << std::right << std::setw(14) << fmt(c.estimate)
             << "  [" << fmt(c.lower) << ", " << fmt(c.upper) << "]\n";
    }
    doc["estimates"].push_back(entry);
  }
  if (args.out == "json")
    std::cout << doc.dump(2) << "\n";
  else
    std::cout << text.str();
}

// ---- simulate ----

struct SimulateArgs {
  std::optional<std::string> scenario;
  std::optional<std::size_t> n;
  std::optional<std::size_t> reps;
  std::optional<std::uint64_t> seed;
  std::string out = "json";
  bool full_scale = false;
  std::optional<std::string> config;
  bool skip_failed = false;
};

void cmd_simulate(const SimulateArgs& args) {
  const auto format = ivstat::parse_table_format(args.out);
  std::optional<ivstat::SimulationConfig> config;
  if (args.config) {
    json doc;
    try {
      doc = json::parse(read_file(*args.config));
    } catch (const json::parse_error& e) {
      throw InputError(std::string("config is not valid JSON: ") + e.what());
    }
    if (args.scenario) doc["scenario"] = *args.scenario;
    if (args.n) doc["n"] = *args.n;
    config.emplace(ivstat::config_from_json(doc));
  } else {
    if (!args.scenario) throw InputError("--scenario is required (or pass --config)");
    if (!args.n) throw InputError("--n is required (or pass --config)");
    const auto scenario = ivstat::parse_scenario(*args.scenario);
    if (scenario == ivstat::Scenario::kCustom) throw InputError("a custom scenario needs --config");
    config.emplace(ivstat::preset_config(scenario, *args.n, ivstat::kDeskReps, 0));
  }
  if (args.full_scale) config->reps = ivstat::kFullScaleReps;
  if (args.reps) config->reps = *args.reps;
  if (args.seed) config->seed = *args.seed;
  if (args.skip_failed) config->skip_failed = true;
  std::cout << ivstat::emit_table(ivstat::run_scenario(*config), format);
}

// ---- gof ----

struct GofArgs {
  std::string file;
  double df = 0.0;
  std::size_t bootstrap = 0;
  std::uint64_t seed = 0;
  std::optional<std::size_t> bins;
  std::string out = "json";
};

void cmd_gof(const GofArgs& args) {
  check_format(args.out, {"json", "text"});
  const auto data = load_dataset(args.file);
  if (data.n() < 5) throw InputError("insufficient observations: goodness-of-fit needs n >= 5, got " +
                                     std::to_string(data.n()));
  const auto reps = ivstat::to_internal(data);
  const auto stats = ivstat::sufficient_stats(reps);
  const ivstat::SpdMatrix lambda_hat(ivstat::ml_estimate(stats, args.df).lambda_hat);
  std::vector<ivstat::Matrix> observed;
  std::vector<ivstat::Vector> means;
  for (const auto& r : reps) {
    observed.push_back(r.theta2);
    means.push_back(r.theta1);
  }

  const ivstat::RngStream rng(args.seed);
  ivstat::GofResult wishart;
  if (args.bootstrap == 0) {
    ivstat::RngStream local = rng;
    wishart = ivstat::gof_wishart(observed, args.df, lambda_hat, local, args.bins);
  } else {
    wishart = ivstat::gof_wishart_bootstrap(observed, args.df, lambda_hat, args.bootstrap, rng, args.bins);
  }

  json doc = {{"n", data.n()},
              {"p", data.p()},
              {"lambda_hat", ivstat::matrix_to_json(lambda_hat.matrix())},
              {"wishart", ivstat::to_json(wishart)}};
  std::optional<std::pair<ivstat::GofResult, ivstat::GofResult>> mardia;
  try {
    mardia = ivstat::mardia_test(means);
    doc["mardia"] = {{"skewness", ivstat::to_json(mardia->first)}, {"kurtosis", ivstat::to_json(mardia->second)}};
  } catch (const ivstat::Error& e) {
    doc["mardia"] = {{"error", e.what()}};
  }

  if (args.out == "json") {
    std::cout << doc.dump(2) << "\n";
    return;
  }
  std::cout << "n = " << data.n() << ", p = " << data.p() << ", Wishart df = " << fmt(args.df) << "\n";
  std::cout << "Lambda (ML):\n" << matrix_text(lambda_hat.matrix(), "  ");
  auto line = [](const ivstat::GofResult& r) {
    std::cout << std::left << std::setw(18) << ivstat::to_string(r.method) << " statistic = " << std::setw(12)
              << fmt(r.statistic) << " p-value = " << fmt(r.p_value) << "\n";
  };
  line(wishart);
  for (const auto& w : wishart.warnings) std::cout << "  warning: " << w << "\n";
  if (mardia) {
    line(mardia->first);
    line(mardia->second);
  } else {
    std::cout << "Mardia test unavailable: " << doc["mardia"]["error"].get<std::string>() << "\n";
  }
}

// ---- risk ----

struct RiskArgs {
  std::string scenario;
  std::size_t n = 25;
  std::size_t reps = ivstat::kDeskReps;
  std::uint64_t seed = 0;
  std::string out = "json";
};

void cmd_risk(const RiskArgs& args) {
  check_format(args.out, {"json", "text"});
  const auto scenario = ivstat::parse_scenario(args.scenario);
  if (scenario == ivstat::Scenario::kCustom) throw InputError("risk needs a preset scenario");
  if (args.reps < 2) throw InputError("--reps must be at least 2");
  const auto truth = ivstat::scenario_preset(scenario);
  const auto p = static_cast<std::size_t>(truth.dim());
  const ivstat::RngStream rng(args.seed);
  const auto closed = ivstat::risk_gap_closed_form(args.n, truth.m, p);

  json comparisons = json::array();
  std::vector<ivstat::RiskComparison> results;
  for (auto orientation : {ivstat::LossOrientation::kRiskOrder, ivstat::LossOrientation::kTruthReference})
    for (auto target : {ivstat::Target::kSigma, ivstat::Target::kLambda}) {
      results.push_back(ivstat::compare_risk(target, truth, args.n, args.reps, rng, orientation));
      comparisons.push_back(ivstat::to_json(results.back()));
    }
  json doc = {{"scenario", ivstat::to_string(scenario)},
              {"n", args.n},
              {"p", p},
              {"m", truth.m},
              {"reps", args.reps},
              {"seed", args.seed},
              {"comparisons", comparisons},
              {"closed_form", {{"delta_sigma", closed.delta_sigma}, {"delta_lambda", closed.delta_lambda}}}};
  if (args.out == "json") {
    std::cout << doc.dump(2) << "\n";
    return;
  }
  std::cout << "Scenario " << ivstat::to_string(scenario) << ", n = " << args.n << ", replications = " << args.reps
            << ", seed = " << args.seed << "\n";
  for (const auto& c : results)
    std::cout << std::left << std::setw(7) << ivstat::to_string(c.target) << std::setw(16)
              << ivstat::to_string(c.orientation) << " ML " << fmt(c.ml_risk) << " (SE " << fmt(c.ml_se, 3)
              << ")  Bayes " << fmt(c.bayes_risk) << " (SE " << fmt(c.bayes_se, 3) << ")  gap " << fmt(c.gap)
              << " (SE " << fmt(c.gap_se, 3) << ")\n";
  std::cout << "closed form: delta_sigma = " << fmt(closed.delta_sigma)
            << ", delta_lambda = " << fmt(closed.delta_lambda) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inference for multivariate interval-valued data"};
  app.require_subcommand(1, 1);

  DescribeArgs describe;
  auto* c_describe = app.add_subcommand("describe", "Descriptive statistics of an interval dataset");
  c_describe->add_option("file", describe.file, "CSV with columns a_1,b_1,...")->required();
  c_describe->add_option("--out", describe.out, "json or text");

  EstimateArgs estimate;
  auto* c_estimate = app.add_subcommand("estimate", "ML and Bayes parameter estimates");
  c_estimate->add_option("file", estimate.file, "CSV with columns a_1,b_1,...")->required();
  c_estimate->add_option("--wishart-df", estimate.df, "Wishart degrees of freedom m")->required();
  c_estimate->add_option("--method", estimate.method, "ml, bayes or both")
      ->check(CLI::IsMember({"ml", "bayes", "both"}));
  c_estimate->add_option("--ci", estimate.ci, "Wald interval level, e.g. 0.95");
  c_estimate->add_option("--out", estimate.out, "json or text");

  SimulateArgs simulate;
  auto* c_simulate = app.add_subcommand("simulate", "Monte Carlo comparison of the estimators");
  c_simulate->add_option("--scenario", simulate.scenario, "I, II, III (or custom via --config)");
  c_simulate->add_option("--n", simulate.n, "sample size per replication");
  c_simulate->add_option("--reps", simulate.reps, "replications (default 2000)");
  c_simulate->add_option("--seed", simulate.seed, "random seed");
  c_simulate->add_option("--out", simulate.out, "json, csv or text");
  c_simulate->add_flag("--full-scale", simulate.full_scale, "use 10000 replications");
  c_simulate->add_option("--config", simulate.config, "JSON config document");
  c_simulate->add_flag("--skip-failed", simulate.skip_failed, "skip replications whose estimators fail");

  GofArgs gof;
  auto* c_gof = app.add_subcommand("gof", "Wishart goodness-of-fit and Mardia normality tests");
  c_gof->add_option("file", gof.file, "CSV with columns a_1,b_1,...")->required();
  c_gof->add_option("--wishart-df", gof.df, "Wishart degrees of freedom m")->required();
  c_gof->add_option("--bootstrap", gof.bootstrap, "bootstrap iterations; 0 uses the chi-squared reference");
  c_gof->add_option("--seed", gof.seed, "random seed");
  c_gof->add_option("--bins", gof.bins, "bins per coordinate (default floor(sqrt(n)))");
  c_gof->add_option("--out", gof.out, "json or text");

  RiskArgs risk;
  auto* c_risk = app.add_subcommand("risk", "Monte Carlo entropy-loss risk of the estimators");
  c_risk->add_option("--scenario", risk.scenario, "I, II or III")->required();
  c_risk->add_option("--n", risk.n, "sample size (default 25)");
  c_risk->add_option("--reps", risk.reps, "replications (default 2000)");
  c_risk->add_option("--seed", risk.seed, "random seed");
  c_risk->add_option("--out", risk.out, "json or text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*c_describe) cmd_describe(describe);
    if (*c_estimate) cmd_estimate(estimate);
    if (*c_simulate) cmd_simulate(simulate);
    if (*c_gof) cmd_gof(gof);
    if (*c_risk) cmd_risk(risk);
  } catch (const ivstat::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const ivstat::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return 0;
}
