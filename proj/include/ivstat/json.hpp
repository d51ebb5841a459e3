#pragma once

// JSON views of the library's report types. Matrices are arrays of rows.

#include <json.hpp>

#include "ivstat/estimation.hpp"
#include "ivstat/gof.hpp"
#include "ivstat/interval.hpp"
#include "ivstat/loss_risk.hpp"
#include "ivstat/simulation.hpp"

namespace ivstat {

inline nlohmann::json to_json(const InternalRep& rep) {
  return {{"theta1", vector_to_json(rep.theta1)}, {"theta2", matrix_to_json(rep.theta2)}};
}

inline nlohmann::json to_json(const DescriptiveReport& rep) {
  nlohmann::json vars = nlohmann::json::array();
  for (std::size_t j = 0; j < rep.names.size(); ++j)
    vars.push_back({{"name", rep.names[j]}, {"mean", rep.variables[j].mean}, {"variance", rep.variables[j].variance}});
  nlohmann::json cov = nlohmann::json::array();
  for (Eigen::Index j = 0; j < rep.covariance.rows(); ++j)
    for (Eigen::Index k = j + 1; k < rep.covariance.cols(); ++k)
      cov.push_back({{"variables", {rep.names[static_cast<std::size_t>(j)], rep.names[static_cast<std::size_t>(k)]}},
                     {"covariance", rep.covariance(j, k)}});
  return {{"variables", vars}, {"covariances", cov}, {"covariance_matrix", matrix_to_json(rep.covariance)}};
}

inline nlohmann::json to_json(const ParamEstimate& e) {
  return {{"method", to_string(e.method)},
          {"m", e.m_used},
          {"mu", vector_to_json(e.mu_hat)},
          {"sigma", matrix_to_json(e.sigma_hat)},
          {"lambda", matrix_to_json(e.lambda_hat)},
          {"sigma_singular", e.sigma_singular}};
}

inline nlohmann::json to_json(const std::vector<WaldInterval>& cis) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& ci : cis)
    out.push_back({{"parameter", ci.parameter}, {"estimate", ci.estimate}, {"lower", ci.lower}, {"upper", ci.upper}});
  return out;
}

inline nlohmann::json to_json(const GofResult& r) {
  nlohmann::json out = {{"method", to_string(r.method)},
                        {"statistic", r.statistic},
                        {"p_value", r.p_value},
                        {"reference_df", r.reference_df},
                        {"warnings", r.warnings}};
  if (r.coefficient) out["coefficient"] = *r.coefficient;
  nlohmann::json cfg = nlohmann::json::object();
  if (r.config.df) cfg["df"] = *r.config.df;
  if (r.config.bootstrap) cfg["bootstrap"] = *r.config.bootstrap;
  if (r.config.seed) cfg["seed"] = *r.config.seed;
  if (r.config.stream) cfg["stream"] = *r.config.stream;
  if (r.config.bins) cfg["bins"] = *r.config.bins;
  out["config"] = cfg;
  return out;
}

inline nlohmann::json to_json(const ModelParams& truth) {
  return {{"mu", vector_to_json(truth.mu)},
          {"sigma", matrix_to_json(truth.sigma.matrix())},
          {"lambda", matrix_to_json(truth.lambda.matrix())},
          {"m", truth.m}};
}

inline nlohmann::json to_json(const RiskReport& r) {
  return {{"estimator", to_string(r.estimator)},
          {"target", to_string(r.target)},
          {"orientation", to_string(r.orientation)},
          {"risk", r.risk},
          {"mc_se", r.mc_se},
          {"replications", r.replications},
          {"n", r.n},
          {"seed", r.seed},
          {"stream", r.stream},
          {"truth", to_json(r.truth)}};
}

inline nlohmann::json to_json(const RiskComparison& c) {
  return {{"target", to_string(c.target)},
          {"orientation", to_string(c.orientation)},
          {"ml_risk", c.ml_risk},
          {"ml_se", c.ml_se},
          {"bayes_risk", c.bayes_risk},
          {"bayes_se", c.bayes_se},
          {"gap", c.gap},
          {"gap_se", c.gap_se},
          {"replications", c.replications},
          {"n", c.n}};
}

}  // namespace ivstat
