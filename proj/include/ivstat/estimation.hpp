#pragma once

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ivstat/distributions.hpp"
#include "ivstat/interval.hpp"
#include "ivstat/model.hpp"

namespace ivstat {

/// Everything the closed-form estimators consume.
struct SufficientStats {
  Vector theta_bar;   // mean of theta1
  Matrix scatter;     // S = sum (theta1 - theta_bar)(theta1 - theta_bar)^T
  Matrix theta2_sum;  // sum theta2
  std::size_t n = 0;

  Eigen::Index dim() const { return theta_bar.size(); }
};

inline SufficientStats sufficient_stats(std::span<const InternalRep> reps) {
  if (reps.empty()) throw InputError("sufficient statistics need at least one observation");
  const Eigen::Index p = reps.front().theta1.size();
  SufficientStats s;
  s.n = reps.size();
  s.theta_bar = Vector::Zero(p);
  s.scatter = Matrix::Zero(p, p);
  s.theta2_sum = Matrix::Zero(p, p);
  for (const auto& r : reps) {
    if (r.theta1.size() != p || r.theta2.rows() != p || r.theta2.cols() != p)
      throw InputError("observations differ in dimension");
    s.theta_bar += r.theta1;
    s.theta2_sum += r.theta2;
  }
  s.theta_bar /= static_cast<double>(s.n);
  // second pass on centered values
  for (const auto& r : reps) {
    const Vector d = r.theta1 - s.theta_bar;
    s.scatter.noalias() += d * d.transpose();
  }
  s.scatter = symmetrize(s.scatter);
  s.theta2_sum = symmetrize(s.theta2_sum);
  return s;
}

enum class Method { kMl, kBayes };

inline const char* to_string(Method m) { return m == Method::kMl ? "ML" : "Bayes"; }

struct ParamEstimate {
  Vector mu_hat;
  Matrix sigma_hat;
  Matrix lambda_hat;
  Method method = Method::kMl;
  double m_used = 0.0;
  /// Set when sigma_hat is singular (for example n = 1); the estimate is
  /// still returned.
  bool sigma_singular = false;
};

namespace detail {

inline void require_df_at_least_p(double m, Eigen::Index p) {
  if (!(m >= static_cast<double>(p))) throw DomainError("Wishart degrees of freedom m must be at least p");
}

}  // namespace detail

/// mu = theta_bar, Sigma = S/n, Lambda = sum theta2 / (n m).
inline ParamEstimate ml_estimate(const SufficientStats& stats, double m) {
  detail::require_df_at_least_p(m, stats.dim());
  const double n = static_cast<double>(stats.n);
  ParamEstimate e;
  e.method = Method::kMl;
  e.m_used = m;
  e.mu_hat = stats.theta_bar;
  e.sigma_hat = stats.scatter / n;
  e.lambda_hat = stats.theta2_sum / (n * m);
  e.sigma_singular = stats.n < 2 || !cholesky_lower(e.sigma_hat).has_value();
  return e;
}

/// Posterior means: mu = theta_bar, Sigma = S/(n-p), Lambda = sum theta2 / (n m - p - 1).
inline ParamEstimate bayes_estimate(const SufficientStats& stats, double m) {
  detail::require_df_at_least_p(m, stats.dim());
  const double n = static_cast<double>(stats.n);
  const double p = static_cast<double>(stats.dim());
  if (!(n > p)) throw NumericalError("posterior mean undefined: Sigma needs n > p");
  if (!(n * m > p + 1.0)) throw NumericalError("posterior mean undefined: Lambda needs n*m > p + 1");
  ParamEstimate e;
  e.method = Method::kBayes;
  e.m_used = m;
  e.mu_hat = stats.theta_bar;
  e.sigma_hat = stats.scatter / (n - p);
  e.lambda_hat = stats.theta2_sum / (n * m - p - 1.0);
  e.sigma_singular = !cholesky_lower(e.sigma_hat).has_value();
  return e;
}

/// Normal log-likelihood of the theta1 part, including constants.
inline double log_likelihood_L1(const Vector& mu, const SpdMatrix& sigma, std::span<const InternalRep> reps) {
  KahanSum sum;
  for (const auto& r : reps) sum.add(mvn_logpdf(r.theta1, mu, sigma));
  return sum.value();
}

/// Wishart log-likelihood of the theta2 part with the full normaliser.
/// Every theta2 must be positive definite.
inline double log_likelihood_L2(const SpdMatrix& lambda, double m, std::span<const InternalRep> reps) {
  const WishartParams w(m, lambda);
  KahanSum sum;
  for (const auto& r : reps) {
    auto a = SpdMatrix::try_make(r.theta2);
    if (!a) throw NumericalError("L2 needs positive-definite theta2; use log_likelihood_L2_kernel");
    sum.add(wishart_logpdf(*a, w));
  }
  return sum.value();
}

/// Lambda-dependent part of L2: -(n m / 2) log|Lambda| - tr(Lambda^{-1} sum theta2) / 2.
/// Defined for rank-deficient theta2.
inline double log_likelihood_L2_kernel(const SpdMatrix& lambda, double m, const SufficientStats& stats) {
  const double n = static_cast<double>(stats.n);
  return -0.5 * n * m * lambda.log_det() - 0.5 * lambda.solve(stats.theta2_sum).trace();
}

/// Expected information for one observation of N_p(mu, Sigma), parameters
/// ordered as (mu_1..mu_p, vech(Sigma)).
struct FisherInfo {
  Matrix matrix;
  std::vector<std::string> labels;

  Eigen::Index size() const { return matrix.rows(); }
};

inline std::vector<std::string> parameter_labels(Eigen::Index p) {
  std::vector<std::string> labels;
  for (Eigen::Index i = 0; i < p; ++i) labels.push_back("mu" + std::to_string(i + 1));
  for (auto [i, j] : vech_indices(p)) labels.push_back("sigma" + std::to_string(i + 1) + std::to_string(j + 1));
  return labels;
}

/// Blocks: Sigma^{-1} for mu; (1/2) tr(Sigma^{-1} E_a Sigma^{-1} E_b) for the
/// vech(Sigma) coordinates, where E_a is the symmetric unit perturbation.
/// Cross terms vanish.
inline FisherInfo fisher_information(const SpdMatrix& sigma) {
  const Eigen::Index p = sigma.dim();
  const auto idx = vech_indices(p);
  const Eigen::Index q = p + static_cast<Eigen::Index>(idx.size());
  const Matrix inv = sigma.inverse();
  FisherInfo info;
  info.matrix = Matrix::Zero(q, q);
  info.matrix.topLeftCorner(p, p) = inv;
  auto unit = [p](Eigen::Index i, Eigen::Index j) {
    Matrix e = Matrix::Zero(p, p);
    e(i, j) = 1.0;
    e(j, i) = 1.0;
    return e;
  };
  for (std::size_t a = 0; a < idx.size(); ++a) {
    const Matrix left = inv * unit(idx[a].first, idx[a].second);
    for (std::size_t b = a; b < idx.size(); ++b) {
      const Matrix right = inv * unit(idx[b].first, idx[b].second);
      const double v = 0.5 * (left * right).trace();
      info.matrix(p + static_cast<Eigen::Index>(a), p + static_cast<Eigen::Index>(b)) = v;
      info.matrix(p + static_cast<Eigen::Index>(b), p + static_cast<Eigen::Index>(a)) = v;
    }
  }
  info.labels = parameter_labels(p);
  return info;
}

struct WaldInterval {
  std::string parameter;
  double estimate;
  double lower;
  double upper;
};

/// Wald intervals est_k +/- z sqrt([I^{-1}]_kk / n) at the estimate.
inline std::vector<WaldInterval> asymptotic_ci(const ParamEstimate& estimate, const SufficientStats& stats,
                                               double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must lie in (0, 1)");
  auto sigma = SpdMatrix::try_make(estimate.sigma_hat);
  if (!sigma) throw NumericalError("singular information: Sigma estimate is not positive definite");
  const FisherInfo info = fisher_information(*sigma);
  const auto inv = SpdMatrix::try_make(info.matrix);
  if (!inv) throw NumericalError("singular information matrix");
  const Matrix cov = inv->inverse();
  const double z = boost::math::quantile(boost::math::normal(), 0.5 * (1.0 + level));
  const double n = static_cast<double>(stats.n);

  Vector omega(info.size());
  omega << estimate.mu_hat, vech(estimate.sigma_hat);
  std::vector<WaldInterval> out;
  for (Eigen::Index k = 0; k < omega.size(); ++k) {
    const double half = z * std::sqrt(cov(k, k) / n);
    out.push_back({info.labels[static_cast<std::size_t>(k)], omega(k), omega(k) - half, omega(k) + half});
  }
  return out;
}

// ---- Gibbs full conditionals ----

/// mu | Sigma, data ~ N_p(theta_bar, Sigma / n)
inline Vector gibbs_mu(const SpdMatrix& sigma, const SufficientStats& stats, RngStream& rng) {
  return mvn_sample(stats.theta_bar, SpdMatrix(sigma.matrix() / static_cast<double>(stats.n)), rng);
}

/// Sigma | mu, data ~ IW_p(n + 2, sum (theta1 - mu)(theta1 - mu)^T).
/// With gibbs_mu this chain has Sigma-marginal IW_p(n + 1, S), whose mean is
/// the closed-form Bayes estimate S / (n - p).
inline Matrix gibbs_sigma(const Vector& mu, std::span<const InternalRep> reps, RngStream& rng) {
  Matrix scale = Matrix::Zero(mu.size(), mu.size());
  for (const auto& r : reps) {
    const Vector d = r.theta1 - mu;
    scale.noalias() += d * d.transpose();
  }
  auto spd = SpdMatrix::try_make(symmetrize(scale));
  if (!spd) throw NumericalError("rank-deficient conditional scale for Sigma (need n >= p + 1)");
  return inverse_wishart_sample(static_cast<double>(reps.size()) + 2.0, *spd, rng);
}

/// Lambda | data ~ IW_p(n m, sum theta2)
inline Matrix gibbs_lambda(std::span<const InternalRep> reps, double m, RngStream& rng) {
  const SufficientStats stats = sufficient_stats(reps);
  auto spd = SpdMatrix::try_make(stats.theta2_sum);
  if (!spd) throw NumericalError("rank-deficient conditional scale for Lambda");
  return inverse_wishart_sample(static_cast<double>(stats.n) * m, *spd, rng);
}

struct GibbsConfig {
  std::size_t iterations = 20000;
  std::size_t burn_in = 1000;
  std::size_t batches = 50;  // batch means for Monte Carlo standard errors
};

struct GibbsSummary {
  Vector mu_mean, mu_se;
  Matrix sigma_mean, sigma_se;
  Matrix lambda_mean, lambda_se;
  std::size_t kept = 0;
};

/// Two-block (mu, Sigma) Gibbs sampler plus independent Lambda draws.
inline GibbsSummary run_gibbs(std::span<const InternalRep> reps, double m, const GibbsConfig& config,
                              RngStream rng) {
  if (config.iterations <= config.burn_in || config.batches < 2)
    throw DomainError("Gibbs run needs iterations > burn_in and at least two batches");
  const SufficientStats stats = sufficient_stats(reps);
  const Eigen::Index p = stats.dim();
  const std::size_t kept = config.iterations - config.burn_in;
  const std::size_t batch_len = kept / config.batches;
  if (batch_len == 0) throw DomainError("too few kept draws for the requested batch count");

  std::vector<Vector> mu_draws;
  std::vector<Matrix> sigma_draws, lambda_draws;
  mu_draws.reserve(kept);
  sigma_draws.reserve(kept);
  lambda_draws.reserve(kept);

  Vector mu = stats.theta_bar;
  Matrix sigma = stats.scatter / static_cast<double>(stats.n);
  for (std::size_t it = 0; it < config.iterations; ++it) {
    mu = gibbs_mu(SpdMatrix(sigma), stats, rng);
    sigma = gibbs_sigma(mu, reps, rng);
    Matrix lambda = gibbs_lambda(reps, m, rng);
    if (it >= config.burn_in) {
      mu_draws.push_back(mu);
      sigma_draws.push_back(sigma);
      lambda_draws.push_back(std::move(lambda));
    }
  }

  auto summarize = [&](const auto& draws, auto zero, auto& mean, auto& se) {
    std::vector<decltype(zero)> batch_means(config.batches, zero);
    mean = zero;
    for (std::size_t b = 0; b < config.batches; ++b) {
      for (std::size_t k = 0; k < batch_len; ++k) batch_means[b] += draws[b * batch_len + k];
      batch_means[b] /= static_cast<double>(batch_len);
      mean += batch_means[b];
    }
    mean /= static_cast<double>(config.batches);
    auto var = zero;
    for (const auto& bm : batch_means) var += (bm - mean).array().square().matrix();
    var /= static_cast<double>(config.batches - 1);
    se = (var / static_cast<double>(config.batches)).array().sqrt().matrix();
  };

  GibbsSummary out;
  out.kept = batch_len * config.batches;
  summarize(mu_draws, Vector(Vector::Zero(p)), out.mu_mean, out.mu_se);
  summarize(sigma_draws, Matrix(Matrix::Zero(p, p)), out.sigma_mean, out.sigma_se);
  summarize(lambda_draws, Matrix(Matrix::Zero(p, p)), out.lambda_mean, out.lambda_se);
  return out;
}

// ---- p = 2 convenience form ----

struct BivariateEstimate {
  double mu1, mu2;
  double sigma1_sq, sigma2_sq, rho;
  double lambda11, lambda22, lambda12;
};

inline BivariateEstimate bivariate_ml(std::span<const InternalRep> reps, double m) {
  const SufficientStats stats = sufficient_stats(reps);
  if (stats.dim() != 2) throw InputError("bivariate_ml needs p = 2");
  const ParamEstimate e = ml_estimate(stats, m);
  const Matrix& s = stats.scatter;
  if (!(s(0, 0) > 0.0) || !(s(1, 1) > 0.0)) throw NumericalError("correlation undefined: zero variance");
  return {e.mu_hat(0),
          e.mu_hat(1),
          e.sigma_hat(0, 0),
          e.sigma_hat(1, 1),
          s(0, 1) / std::sqrt(s(0, 0) * s(1, 1)),
          e.lambda_hat(0, 0),
          e.lambda_hat(1, 1),
          e.lambda_hat(0, 1)};
}

// ---- normalising transforms ----

namespace detail {

inline void check_transform_args(double value, double kappa) {
  if (!(value > 0.0)) throw DomainError("transform needs a positive value");
  if (!(kappa > -3.0 && kappa < 3.0)) throw DomainError("kappa must lie in (-3, 3)");
}

}  // namespace detail

/// (v^k - 1)/k, log v at k = 0.
inline double boxcox(double value, double kappa) {
  detail::check_transform_args(value, kappa);
  const double log_v = std::log(value);
  if (kappa == 0.0) return log_v;
  return std::expm1(kappa * log_v) / kappa;
}

/// v^k, log v at k = 0.
inline double power_transform(double value, double kappa) {
  detail::check_transform_args(value, kappa);
  if (kappa == 0.0) return std::log(value);
  return std::pow(value, kappa);
}

struct BoxCoxFit {
  double kappa;
  double log_likelihood;
};

/// Grid search over (-3, 3), step 0.01, of the profile normal log-likelihood
///   -n/2 log(sigma_hat^2(k)) + (k - 1) sum log v.
inline BoxCoxFit boxcox_optimal_kappa(std::span<const double> values) {
  if (values.size() < 2) throw InputError("Box-Cox fit needs at least two values");
  double sum_log = 0.0;
  for (double v : values) {
    if (!(v > 0.0)) throw DomainError("transform needs a positive value");
    sum_log += std::log(v);
  }
  const double n = static_cast<double>(values.size());
  BoxCoxFit best{0.0, -std::numeric_limits<double>::infinity()};
  std::vector<double> t(values.size());
  for (int step = -299; step <= 299; ++step) {
    const double kappa = step / 100.0;
    double mean = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) mean += (t[i] = boxcox(values[i], kappa));
    mean /= n;
    double ss = 0.0;
    for (double x : t) ss += (x - mean) * (x - mean);
    if (!(ss > 0.0)) continue;
    const double ll = -0.5 * n * std::log(ss / n) + (kappa - 1.0) * sum_log;
    if (ll > best.log_likelihood) best = {kappa, ll};
  }
  return best;
}

}  // namespace ivstat
