#pragma once

#include <vector>

#include "ivstat/distributions.hpp"
#include "ivstat/interval.hpp"

namespace ivstat {

/// Truth or configuration for the two-part model:
///   theta1 ~ N_p(mu, sigma),  theta2 ~ W_p(m, lambda).
struct ModelParams {
  ModelParams(Vector mu_, SpdMatrix sigma_, SpdMatrix lambda_, double m_)
      : mu(std::move(mu_)), sigma(std::move(sigma_)), lambda(std::move(lambda_)), m(m_) {
    const auto p = mu.size();
    if (p == 0 || sigma.dim() != p || lambda.dim() != p) throw DomainError("model parameter dimensions disagree");
    if (!(m >= static_cast<double>(p))) throw DomainError("Wishart degrees of freedom m must be at least p");
  }

  Vector mu;
  SpdMatrix sigma;
  SpdMatrix lambda;
  double m;

  Eigen::Index dim() const { return mu.size(); }
};

/// n iid draws of (theta1, theta2). Theta1 and theta2 use separate child
/// streams so each block is reproducible on its own.
inline std::vector<InternalRep> sample_model(const ModelParams& truth, std::size_t n, const RngStream& rng) {
  RngStream mean_rng = rng.derive(0);
  RngStream spread_rng = rng.derive(1);
  const WishartParams wishart(truth.m, truth.lambda);
  std::vector<InternalRep> reps(n);
  for (auto& r : reps) r.theta1 = mvn_sample(truth.mu, truth.sigma, mean_rng);
  for (auto& r : reps) r.theta2 = wishart_sample(wishart, spread_rng);
  return reps;
}

}  // namespace ivstat
