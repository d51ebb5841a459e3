#pragma once

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ivstat/distributions.hpp"
#include "ivstat/parallel.hpp"

namespace ivstat {

enum class GofMethod { kMardiaSkew, kMardiaKurt, kWishartGof, kWishartGofBootstrap };

inline const char* to_string(GofMethod m) {
  switch (m) {
    case GofMethod::kMardiaSkew:
      return "mardia-skew";
    case GofMethod::kMardiaKurt:
      return "mardia-kurt";
    case GofMethod::kWishartGof:
      return "wishart-gof";
    case GofMethod::kWishartGofBootstrap:
      return "wishart-gof-boot";
  }
  return "";
}

/// Echo of everything needed to replay a test exactly.
struct GofConfig {
  std::optional<double> df;
  std::optional<std::size_t> bootstrap;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> stream;
  std::optional<std::size_t> bins;
};

struct GofResult {
  GofMethod method = GofMethod::kWishartGof;
  double statistic = 0.0;
  double p_value = 1.0;
  /// Degrees of freedom of the chi-squared reference (0 for a normal reference).
  double reference_df = 0.0;
  /// Mardia b1p / b2p; empty for the Wishart tests.
  std::optional<double> coefficient;
  GofConfig config;
  std::vector<std::string> warnings;
};

inline double chi_squared_sf(double statistic, double df) {
  if (!(df > 0.0)) throw DomainError("chi-squared reference needs positive degrees of freedom");
  if (statistic <= 0.0) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(df), statistic));
}

struct ChiSquareResult {
  double statistic;
  double df;
  double p_value;
};

namespace detail {

/// Linear-interpolation quantile of a sorted sample.
inline double sorted_quantile(const std::vector<double>& sorted, double prob) {
  const double pos = prob * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline std::size_t default_bins(std::size_t n) {
  return std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n)))));
}

}  // namespace detail

/// Two-sample chi-squared homogeneity test on `bins` equiprobable bins cut at
/// pooled-sample quantiles. A value equal to a cut point goes to the lower bin.
/// Bins empty in both samples do not count toward the degrees of freedom.
inline ChiSquareResult chisq_two_sample(std::span<const double> sample_a, std::span<const double> sample_b,
                                        std::size_t bins) {
  if (sample_a.empty() || sample_b.empty()) throw InputError("chi-squared test needs two non-empty samples");
  if (bins < 2) throw InputError("chi-squared test needs at least two bins");
  std::vector<double> pooled(sample_a.begin(), sample_a.end());
  pooled.insert(pooled.end(), sample_b.begin(), sample_b.end());
  std::sort(pooled.begin(), pooled.end());
  if (pooled.front() == pooled.back()) throw NumericalError("degenerate pooled sample: zero spread");

  std::vector<double> cuts(bins - 1);
  for (std::size_t k = 1; k < bins; ++k)
    cuts[k - 1] = detail::sorted_quantile(pooled, static_cast<double>(k) / static_cast<double>(bins));

  auto count = [&](std::span<const double> sample) {
    std::vector<double> c(bins, 0.0);
    for (double x : sample) c[static_cast<std::size_t>(std::lower_bound(cuts.begin(), cuts.end(), x) - cuts.begin())] += 1.0;
    return c;
  };
  const auto ca = count(sample_a);
  const auto cb = count(sample_b);
  const double na = static_cast<double>(sample_a.size());
  const double nb = static_cast<double>(sample_b.size());
  const double total = na + nb;

  double stat = 0.0;
  std::size_t used = 0;
  for (std::size_t k = 0; k < bins; ++k) {
    const double col = ca[k] + cb[k];
    if (col == 0.0) continue;
    ++used;
    const double ea = col * na / total;
    const double eb = col * nb / total;
    stat += (ca[k] - ea) * (ca[k] - ea) / ea + (cb[k] - eb) * (cb[k] - eb) / eb;
  }
  if (used < 2) throw NumericalError("degenerate pooled sample: fewer than two occupied bins");
  const double df = static_cast<double>(used - 1);
  return {stat, df, chi_squared_sf(stat, df)};
}

/// Mardia's multivariate skewness and kurtosis tests, using the ML
/// (divisor n) covariance.
inline std::pair<GofResult, GofResult> mardia_test(std::span<const Vector> samples) {
  const std::size_t n = samples.size();
  if (n == 0) throw InputError("Mardia test needs observations");
  const Eigen::Index p = samples.front().size();
  if (!(n > static_cast<std::size_t>(p))) throw InputError("Mardia test needs n > p");
  Vector mean = Vector::Zero(p);
  for (const auto& x : samples) mean += x;
  mean /= static_cast<double>(n);
  Matrix cov = Matrix::Zero(p, p);
  for (const auto& x : samples) cov.noalias() += (x - mean) * (x - mean).transpose();
  cov /= static_cast<double>(n);
  auto spd = SpdMatrix::try_make(symmetrize(cov));
  if (!spd) throw NumericalError("Mardia test: singular sample covariance");

  // Rows of the whitened data give the Mahalanobis inner products.
  Matrix z(p, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    z.col(static_cast<Eigen::Index>(i)) = spd->lower().triangularView<Eigen::Lower>().solve(samples[i] - mean);
  const Matrix g = z.transpose() * z;

  const double nd = static_cast<double>(n);
  const double pd = static_cast<double>(p);
  const double b1 = g.array().cube().sum() / (nd * nd);
  const double b2 = g.diagonal().array().square().sum() / nd;

  GofResult skew;
  skew.method = GofMethod::kMardiaSkew;
  skew.coefficient = b1;
  skew.statistic = nd * b1 / 6.0;
  skew.reference_df = pd * (pd + 1.0) * (pd + 2.0) / 6.0;
  skew.p_value = chi_squared_sf(skew.statistic, skew.reference_df);

  GofResult kurt;
  kurt.method = GofMethod::kMardiaKurt;
  kurt.coefficient = b2;
  kurt.statistic = (b2 - pd * (pd + 2.0)) / std::sqrt(8.0 * pd * (pd + 2.0) / nd);
  kurt.reference_df = 0.0;
  kurt.p_value = 2.0 * boost::math::cdf(boost::math::complement(boost::math::normal(), std::abs(kurt.statistic)));
  return {skew, kurt};
}

namespace detail {

struct WishartGofStatistic {
  double statistic = 0.0;
  double df = 0.0;
  std::vector<std::string> warnings;
};

/// Core of the Wishart goodness-of-fit test: simulate n draws from
/// W_p(df, Lambda), whiten observed and simulated matrices by Lambda's
/// Cholesky factor, and sum per-coordinate two-sample chi-squared statistics
/// over vech coordinates. Coordinates with zero pooled spread are skipped.
inline WishartGofStatistic wishart_gof_statistic(std::span<const Matrix* const> observed, const WishartParams& model,
                                                 std::size_t bins, RngStream& rng) {
  const std::size_t n = observed.size();
  const Eigen::Index p = model.dim();
  const auto q = static_cast<Eigen::Index>(vech_size(static_cast<std::size_t>(p)));
  Matrix obs_v(q, static_cast<Eigen::Index>(n));
  Matrix sim_v(q, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    obs_v.col(static_cast<Eigen::Index>(i)) = vech(model.scale.whiten(*observed[i]));
  for (std::size_t i = 0; i < n; ++i)
    sim_v.col(static_cast<Eigen::Index>(i)) = vech(model.scale.whiten(wishart_sample(model, rng)));

  WishartGofStatistic out;
  const auto idx = vech_indices(p);
  std::vector<double> a(n), b(n);
  for (Eigen::Index c = 0; c < q; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = obs_v(c, static_cast<Eigen::Index>(i));
      b[i] = sim_v(c, static_cast<Eigen::Index>(i));
    }
    const auto [lo_a, hi_a] = std::minmax_element(a.begin(), a.end());
    const auto [lo_b, hi_b] = std::minmax_element(b.begin(), b.end());
    if (std::min(*lo_a, *lo_b) == std::max(*hi_a, *hi_b)) {
      const auto [i, j] = idx[static_cast<std::size_t>(c)];
      out.warnings.push_back("coordinate (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                             ") has zero pooled spread; skipped");
      continue;
    }
    const auto r = chisq_two_sample(a, b, bins);
    out.statistic += r.statistic;
    out.df += r.df;
  }
  if (!(out.df > 0.0)) throw NumericalError("Wishart goodness-of-fit: every coordinate is degenerate");
  return out;
}

inline void check_gof_inputs(std::span<const Matrix> observed, double df, const SpdMatrix& lambda_hat) {
  if (observed.size() < 5) throw InputError("insufficient observations: Wishart goodness-of-fit needs n >= 5");
  if (!(df >= static_cast<double>(lambda_hat.dim())))
    throw DomainError("Wishart goodness-of-fit needs df >= p");
  for (const auto& o : observed)
    if (o.rows() != lambda_hat.dim() || o.cols() != lambda_hat.dim())
      throw InputError("observed matrix dimension does not match Lambda");
}

inline std::vector<const Matrix*> pointers(std::span<const Matrix> observed) {
  std::vector<const Matrix*> out;
  for (const auto& o : observed) out.push_back(&o);
  return out;
}

}  // namespace detail

/// Wishart goodness-of-fit test with a chi-squared reference on the summed
/// degrees of freedom. `bins` defaults to max(2, floor(sqrt(n))).
inline GofResult gof_wishart(std::span<const Matrix> observed, double df, const SpdMatrix& lambda_hat,
                             RngStream& rng, std::optional<std::size_t> bins = std::nullopt) {
  detail::check_gof_inputs(observed, df, lambda_hat);
  const std::size_t k = bins.value_or(detail::default_bins(observed.size()));
  GofResult res;
  res.method = GofMethod::kWishartGof;
  res.config = {df, std::nullopt, rng.seed(), rng.stream(), k};
  const WishartParams model(df, lambda_hat);
  const auto ptrs = detail::pointers(observed);
  auto stat = detail::wishart_gof_statistic(ptrs, model, k, rng);
  res.statistic = stat.statistic;
  res.reference_df = stat.df;
  res.p_value = chi_squared_sf(stat.statistic, stat.df);
  res.warnings = std::move(stat.warnings);
  return res;
}

/// Bootstrap variant: T_obs on the original matrices (stream rng.derive(0));
/// for b = 1..B resample the observed matrices with replacement, simulate fresh
/// Wishart draws (stream rng.derive(b)) and recompute the statistic.
/// p-value = (1 + #{T_b >= T_obs}) / (B + 1).
inline GofResult gof_wishart_bootstrap(std::span<const Matrix> observed, double df, const SpdMatrix& lambda_hat,
                                       std::size_t iterations, const RngStream& rng,
                                       std::optional<std::size_t> bins = std::nullopt) {
  detail::check_gof_inputs(observed, df, lambda_hat);
  if (iterations < 20) throw InputError("bootstrap needs at least 20 iterations");
  const std::size_t n = observed.size();
  const std::size_t k = bins.value_or(detail::default_bins(n));
  const WishartParams model(df, lambda_hat);
  const auto ptrs = detail::pointers(observed);

  RngStream obs_rng = rng.derive(0);
  auto t_obs = detail::wishart_gof_statistic(ptrs, model, k, obs_rng);

  std::vector<double> t_boot(iterations);
  parallel_for(iterations, [&](std::size_t b) {
    RngStream local = rng.derive(b + 1);
    boost::random::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<const Matrix*> resampled(n);
    for (auto& ptr : resampled) ptr = ptrs[pick(local)];
    t_boot[b] = detail::wishart_gof_statistic(resampled, model, k, local).statistic;
  });

  std::size_t exceed = 0;
  for (double t : t_boot)
    if (t >= t_obs.statistic) ++exceed;

  GofResult res;
  res.method = GofMethod::kWishartGofBootstrap;
  res.statistic = t_obs.statistic;
  res.reference_df = t_obs.df;
  res.p_value = static_cast<double>(1 + exceed) / static_cast<double>(iterations + 1);
  res.config = {df, iterations, rng.seed(), rng.stream(), k};
  res.warnings = std::move(t_obs.warnings);
  return res;
}

}  // namespace ivstat
