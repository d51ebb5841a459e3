#pragma once

// Monte Carlo harness for comparing the ML and Bayes estimators on
// synthetic data drawn from the normal/Wishart model.

#include <json.hpp>

#include <boost/random/exponential_distribution.hpp>

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ivstat/estimation.hpp"
#include "ivstat/model.hpp"
#include "ivstat/parallel.hpp"

namespace ivstat {

enum class Scenario { kI, kII, kIII, kCustom };

inline const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::kI:
      return "I";
    case Scenario::kII:
      return "II";
    case Scenario::kIII:
      return "III";
    case Scenario::kCustom:
      return "custom";
  }
  return "";
}

inline Scenario parse_scenario(std::string_view tag) {
  if (tag == "I") return Scenario::kI;
  if (tag == "II") return Scenario::kII;
  if (tag == "III") return Scenario::kIII;
  if (tag == "custom") return Scenario::kCustom;
  throw InputError("unknown scenario '" + std::string(tag) + "' (expected I, II, III or custom)");
}

inline Method parse_method(std::string_view tag) {
  if (tag == "ML" || tag == "ml") return Method::kMl;
  if (tag == "Bayes" || tag == "bayes") return Method::kBayes;
  throw InputError("unknown estimator '" + std::string(tag) + "' (expected ML or Bayes)");
}

namespace detail {

inline Matrix matrix_from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

}  // namespace detail

/// Scenario I is univariate: theta1 ~ N(2, 5) and theta2 exponential with
/// mean 2. That exponential is W_1(2, 1), which is how it is stored here.
inline ModelParams scenario_preset(Scenario tag) {
  using detail::matrix_from_rows;
  switch (tag) {
    case Scenario::kI:
      return ModelParams(Vector::Constant(1, 2.0), SpdMatrix(matrix_from_rows({{5.0}})),
                         SpdMatrix(matrix_from_rows({{1.0}})), 2.0);
    case Scenario::kII: {
      Vector mu(2);
      mu << 2.0, 4.0;
      return ModelParams(mu, SpdMatrix(matrix_from_rows({{4, 3}, {3, 9}})), SpdMatrix(matrix_from_rows({{2, 1}, {1, 5}})),
                         3.0);
    }
    case Scenario::kIII: {
      Vector mu(3);
      mu << 2.0, 4.0, 6.0;
      return ModelParams(mu, SpdMatrix(matrix_from_rows({{1, 1.4, 0.6}, {1.4, 4, 1.5}, {0.6, 1.5, 9}})),
                         SpdMatrix(matrix_from_rows({{2, 1, 1}, {1, 5, 2}, {1, 2, 3}})), 3.0);
    }
    case Scenario::kCustom:
      break;
  }
  throw InputError("scenario has no preset");
}

struct SimulationConfig {
  Scenario scenario;
  ModelParams truth;
  std::size_t n;
  std::size_t reps;
  std::uint64_t seed;
  std::vector<Method> estimators{Method::kMl, Method::kBayes};
  /// Skip replications whose estimator preconditions fail instead of aborting.
  bool skip_failed = false;
};

inline constexpr std::size_t kDeskReps = 2000;
inline constexpr std::size_t kFullScaleReps = 10000;

inline SimulationConfig preset_config(Scenario scenario, std::size_t n, std::size_t reps, std::uint64_t seed) {
  return SimulationConfig{scenario, scenario_preset(scenario), n, reps, seed};
}

struct SimulationRow {
  std::string parameter;
  Method estimator;
  double mean;
  std::optional<double> sd;  // absent when fewer than two replications succeeded
};

struct SimulationReport {
  Scenario scenario = Scenario::kCustom;
  std::size_t n = 0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  std::size_t p = 0;
  double m = 0.0;
  std::vector<Method> estimators;
  std::vector<SimulationRow> rows;
  std::size_t failed = 0;
  std::vector<std::string> failures;
  bool sd_available = true;
};

/// Parameter names in report order. For p = 1: mu, sigma^2, lambda (the
/// univariate reduction sum(theta2)/n) and lambda_w1 (general formula with
/// the W_1 degrees of freedom). For p >= 2: means, variances, covariances,
/// then the Lambda diagonal and off-diagonal entries.
inline std::vector<std::string> simulation_parameters(std::size_t p) {
  if (p == 1) return {"mu", "sigma^2", "lambda", "lambda_w1"};
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= p; ++i) out.push_back("mu" + std::to_string(i));
  for (std::size_t i = 1; i <= p; ++i) out.push_back("sigma" + std::to_string(i) + "^2");
  for (std::size_t i = 1; i <= p; ++i)
    for (std::size_t j = i + 1; j <= p; ++j) out.push_back("sigma" + std::to_string(i) + std::to_string(j));
  for (std::size_t i = 1; i <= p; ++i) out.push_back("lambda" + std::to_string(i) + std::to_string(i));
  for (std::size_t i = 1; i <= p; ++i)
    for (std::size_t j = i + 1; j <= p; ++j) out.push_back("lambda" + std::to_string(i) + std::to_string(j));
  return out;
}

namespace detail {

inline std::vector<double> flatten_estimate(const ParamEstimate& e, const SufficientStats& stats) {
  const Eigen::Index p = e.mu_hat.size();
  if (p == 1)
    return {e.mu_hat(0), e.sigma_hat(0, 0), stats.theta2_sum(0, 0) / static_cast<double>(stats.n), e.lambda_hat(0, 0)};
  std::vector<double> out;
  for (Eigen::Index i = 0; i < p; ++i) out.push_back(e.mu_hat(i));
  for (Eigen::Index i = 0; i < p; ++i) out.push_back(e.sigma_hat(i, i));
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = i + 1; j < p; ++j) out.push_back(e.sigma_hat(i, j));
  for (Eigen::Index i = 0; i < p; ++i) out.push_back(e.lambda_hat(i, i));
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = i + 1; j < p; ++j) out.push_back(e.lambda_hat(i, j));
  return out;
}

/// One synthetic dataset. Scenario I draws theta2 from the exponential
/// generator directly; other scenarios use the Wishart sampler.
inline std::vector<InternalRep> draw_scenario(const SimulationConfig& config, const RngStream& rng) {
  if (config.scenario != Scenario::kI) return sample_model(config.truth, config.n, rng);
  RngStream mean_rng = rng.derive(0);
  RngStream spread_rng = rng.derive(1);
  const double mean_spread = config.truth.m * config.truth.lambda.matrix()(0, 0);
  boost::random::exponential_distribution<double> expo(1.0 / mean_spread);
  std::vector<InternalRep> reps(config.n);
  for (auto& r : reps) r.theta1 = mvn_sample(config.truth.mu, config.truth.sigma, mean_rng);
  for (auto& r : reps) r.theta2 = Matrix::Constant(1, 1, expo(spread_rng));
  return reps;
}

}  // namespace detail

/// Replication r uses stream RngStream(seed).derive(r); results are merged in
/// replication order, so the report does not depend on the worker count.
inline SimulationReport run_scenario(const SimulationConfig& config, std::size_t workers = worker_count()) {
  if (config.reps < 1) throw InputError("reps must be at least 1");
  if (config.n < 1) throw InputError("n must be at least 1");
  if (config.estimators.empty()) throw InputError("no estimators requested");
  const std::size_t p = static_cast<std::size_t>(config.truth.dim());
  const std::size_t n_est = config.estimators.size();
  const RngStream root(config.seed);

  struct RepResult {
    std::vector<std::vector<double>> values;  // per estimator
    std::string error;
  };
  std::vector<RepResult> results(config.reps);
  parallel_for(
      config.reps,
      [&](std::size_t r) {
        const auto data = detail::draw_scenario(config, root.derive(r));
        const SufficientStats stats = sufficient_stats(data);
        try {
          for (Method method : config.estimators) {
            const ParamEstimate e =
                method == Method::kMl ? ml_estimate(stats, config.truth.m) : bayes_estimate(stats, config.truth.m);
            results[r].values.push_back(detail::flatten_estimate(e, stats));
          }
        } catch (const Error& err) {
          results[r].values.clear();
          results[r].error = "replication " + std::to_string(r) + ": " + err.what();
        }
      },
      workers);

  SimulationReport report;
  report.scenario = config.scenario;
  report.n = config.n;
  report.reps = config.reps;
  report.seed = config.seed;
  report.p = p;
  report.m = config.truth.m;
  report.estimators = config.estimators;
  for (const auto& res : results) {
    if (res.error.empty()) continue;
    if (!config.skip_failed) throw NumericalError(res.error);
    ++report.failed;
    report.failures.push_back(res.error);
  }
  const std::size_t used = config.reps - report.failed;
  if (used == 0) throw NumericalError("every replication failed");
  report.sd_available = used >= 2;

  const auto names = simulation_parameters(p);
  for (std::size_t k = 0; k < n_est; ++k) {
    for (std::size_t q = 0; q < names.size(); ++q) {
      KahanSum sum;
      for (const auto& res : results)
        if (res.error.empty()) sum.add(res.values[k][q]);
      const double mean = sum.value() / static_cast<double>(used);
      std::optional<double> sd;
      if (report.sd_available) {
        KahanSum ss;
        for (const auto& res : results)
          if (res.error.empty()) ss.add((res.values[k][q] - mean) * (res.values[k][q] - mean));
        sd = std::sqrt(ss.value() / static_cast<double>(used - 1));
      }
      report.rows.push_back({names[q], config.estimators[k], mean, sd});
    }
  }
  return report;
}

// --- serialization -------------------------------------------------------

inline nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

inline nlohmann::json vector_to_json(const Vector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline Matrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw InputError("expected a non-empty array of rows");
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j[0].size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != static_cast<std::size_t>(m.cols()))
      throw InputError("matrix rows differ in length");
    for (std::size_t k = 0; k < j[i].size(); ++k)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = j[i][k].get<double>();
  }
  return m;
}

inline Vector vector_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw InputError("expected a non-empty array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

/// Reads a simulation config document. Keys: scenario, n, reps, seed,
/// estimators, skip_failed; a custom scenario also needs mu, sigma, lambda, m.
inline SimulationConfig config_from_json(const nlohmann::json& doc) {
  try {
    const Scenario scenario = parse_scenario(doc.at("scenario").get<std::string>());
    const auto n = doc.at("n").get<std::size_t>();
    const auto reps = doc.value("reps", kDeskReps);
    const auto seed = doc.value("seed", std::uint64_t{0});
    std::optional<ModelParams> truth;
    if (scenario == Scenario::kCustom)
      truth.emplace(vector_from_json(doc.at("mu")), SpdMatrix(matrix_from_json(doc.at("sigma"))),
                    SpdMatrix(matrix_from_json(doc.at("lambda"))), doc.at("m").get<double>());
    else
      truth.emplace(scenario_preset(scenario));
    SimulationConfig config{scenario, *truth, n, reps, seed};
    if (doc.contains("estimators")) {
      config.estimators.clear();
      for (const auto& e : doc.at("estimators")) config.estimators.push_back(parse_method(e.get<std::string>()));
    }
    config.skip_failed = doc.value("skip_failed", false);
    return config;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid simulation config: ") + e.what());
  } catch (const NumericalError& e) {
    throw InputError(std::string("invalid simulation config: ") + e.what());
  }
}

inline nlohmann::json to_json(const SimulationReport& report) {
  nlohmann::json estimators = nlohmann::json::array();
  for (Method m : report.estimators) estimators.push_back(to_string(m));
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.rows) {
    nlohmann::json r = {{"parameter", row.parameter}, {"estimator", to_string(row.estimator)}, {"mean", row.mean}};
    r["sd"] = row.sd ? nlohmann::json(*row.sd) : nlohmann::json(nullptr);
    rows.push_back(r);
  }
  return {{"config",
           {{"scenario", to_string(report.scenario)},
            {"n", report.n},
            {"reps", report.reps},
            {"seed", report.seed},
            {"p", report.p},
            {"m", report.m},
            {"estimators", estimators}}},
          {"rows", rows},
          {"sd_available", report.sd_available},
          {"failed", report.failed},
          {"failures", report.failures}};
}

inline SimulationReport report_from_json(const nlohmann::json& doc) {
  try {
    SimulationReport report;
    const auto& cfg = doc.at("config");
    report.scenario = parse_scenario(cfg.at("scenario").get<std::string>());
    report.n = cfg.at("n").get<std::size_t>();
    report.reps = cfg.at("reps").get<std::size_t>();
    report.seed = cfg.at("seed").get<std::uint64_t>();
    report.p = cfg.at("p").get<std::size_t>();
    report.m = cfg.at("m").get<double>();
    for (const auto& e : cfg.at("estimators")) report.estimators.push_back(parse_method(e.get<std::string>()));
    for (const auto& r : doc.at("rows")) {
      SimulationRow row{r.at("parameter").get<std::string>(), parse_method(r.at("estimator").get<std::string>()),
                        r.at("mean").get<double>(), std::nullopt};
      if (!r.at("sd").is_null()) row.sd = r.at("sd").get<double>();
      report.rows.push_back(row);
    }
    report.sd_available = doc.at("sd_available").get<bool>();
    report.failed = doc.at("failed").get<std::size_t>();
    report.failures = doc.at("failures").get<std::vector<std::string>>();
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid simulation report: ") + e.what());
  }
}

enum class TableFormat { kJson, kCsv, kText };

inline TableFormat parse_table_format(std::string_view tag) {
  if (tag == "json") return TableFormat::kJson;
  if (tag == "csv") return TableFormat::kCsv;
  if (tag == "text") return TableFormat::kText;
  throw InputError("unknown output format '" + std::string(tag) + "'");
}

inline std::string emit_table(const SimulationReport& report, TableFormat format) {
  switch (format) {
    case TableFormat::kJson:
      return to_json(report).dump(2) + "\n";
    case TableFormat::kCsv: {
      std::string out = "parameter,estimator,mean,sd\n";
      for (const auto& row : report.rows)
        out += row.parameter + "," + to_string(row.estimator) + "," + detail::format_double(row.mean) + "," +
               (row.sd ? detail::format_double(*row.sd) : std::string()) + "\n";
      return out;
    }
    case TableFormat::kText: {
      // One line per parameter, one "mean (SD: sd)" column per estimator.
      std::ostringstream os;
      os << "Scenario " << to_string(report.scenario) << ", n = " << report.n << ", replications = " << report.reps
         << ", seed = " << report.seed << "\n";
      os << std::left << std::setw(12) << "Parameter";
      for (Method m : report.estimators) os << std::setw(34) << (std::string(to_string(m)) + " estimation");
      os << "\n";
      const std::size_t per = report.rows.size() / std::max<std::size_t>(1, report.estimators.size());
      for (std::size_t q = 0; q < per; ++q) {
        os << std::setw(12) << report.rows[q].parameter;
        for (std::size_t k = 0; k < report.estimators.size(); ++k) {
          const auto& row = report.rows[k * per + q];
          std::ostringstream cell;
          cell << std::setprecision(7) << row.mean;
          if (row.sd) cell << " (SD: " << std::setprecision(7) << *row.sd << ")";
          os << std::setw(34) << cell.str();
        }
        os << "\n";
      }
      if (!report.sd_available) os << "SD unavailable: fewer than two successful replications\n";
      if (report.failed) os << report.failed << " replication(s) skipped\n";
      return os.str();
    }
  }
  return {};
}

}  // namespace ivstat
