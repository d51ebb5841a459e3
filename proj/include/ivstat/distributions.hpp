#pragma once

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/random/chi_squared_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

#include <cmath>

#include "ivstat/error.hpp"
#include "ivstat/linalg.hpp"
#include "ivstat/rng.hpp"

namespace ivstat {

/// W_p(df, scale). Real df is accepted as long as df > p - 1.
struct WishartParams {
  WishartParams(double df_, SpdMatrix scale_) : df(df_), scale(std::move(scale_)) {
    if (!(df > static_cast<double>(scale.dim()) - 1.0))
      throw DomainError("Wishart degrees of freedom must exceed p - 1");
  }

  double df;
  SpdMatrix scale;

  Eigen::Index dim() const { return scale.dim(); }
};

/// log Gamma_p(z) = p(p-1)/4 log(pi) + sum_{i=1..p} log Gamma(z + (1-i)/2)
inline double multigamma_log(int p, double z) {
  if (p < 1) throw DomainError("multigamma dimension must be positive");
  if (!(z > 0.5 * (p - 1))) throw DomainError("multigamma argument must exceed (p-1)/2");
  double out = 0.25 * p * (p - 1) * std::log(boost::math::constants::pi<double>());
  for (int i = 1; i <= p; ++i) out += boost::math::lgamma(z + 0.5 * (1 - i));
  return out;
}

namespace detail {

inline void require_same_dim(Eigen::Index a, Eigen::Index b) {
  if (a != b) throw DomainError("dimension mismatch");
}

}  // namespace detail

inline double wishart_logpdf(const SpdMatrix& a, const WishartParams& params) {
  detail::require_same_dim(a.dim(), params.dim());
  const double p = static_cast<double>(a.dim());
  const double m = params.df;
  const double trace = params.scale.solve(a.matrix()).trace();
  return 0.5 * (m - p - 1.0) * a.log_det() - 0.5 * trace - 0.5 * m * p * std::log(2.0) -
         0.5 * m * params.scale.log_det() - multigamma_log(static_cast<int>(a.dim()), 0.5 * m);
}

/// IW_p(df, scale) log density; E[B] = scale / (df - p - 1).
inline double inverse_wishart_logpdf(const SpdMatrix& b, double df, const SpdMatrix& scale) {
  detail::require_same_dim(b.dim(), scale.dim());
  const double p = static_cast<double>(b.dim());
  if (!(df > p - 1.0)) throw DomainError("inverse-Wishart degrees of freedom must exceed p - 1");
  const double trace = b.solve(scale.matrix()).trace();
  return 0.5 * df * scale.log_det() - 0.5 * (df + p + 1.0) * b.log_det() - 0.5 * trace -
         0.5 * df * p * std::log(2.0) - multigamma_log(static_cast<int>(b.dim()), 0.5 * df);
}

/// Bartlett construction: A = L T T^T L^T with T lower triangular,
/// T_ii^2 ~ chi2(df - i) and N(0,1) below the diagonal.
inline Matrix wishart_sample(const WishartParams& params, RngStream& rng) {
  const Eigen::Index p = params.dim();
  boost::random::normal_distribution<double> normal;
  Matrix t = Matrix::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    boost::random::chi_squared_distribution<double> chi2(params.df - static_cast<double>(i));
    t(i, i) = std::sqrt(chi2(rng));
    for (Eigen::Index j = 0; j < i; ++j) t(i, j) = normal(rng);
  }
  const Matrix lt = params.scale.lower() * t;
  return symmetrize(lt * lt.transpose());
}

/// Draw from IW_p(df, scale) as the inverse of a W_p(df, scale^{-1}) draw.
inline Matrix inverse_wishart_sample(double df, const SpdMatrix& scale, RngStream& rng) {
  const WishartParams w(df, SpdMatrix(scale.inverse()));
  return SpdMatrix(wishart_sample(w, rng)).inverse();
}

inline Vector mvn_sample(const Vector& mu, const SpdMatrix& sigma, RngStream& rng) {
  detail::require_same_dim(mu.size(), sigma.dim());
  boost::random::normal_distribution<double> normal;
  Vector z(mu.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
  return mu + sigma.lower() * z;
}

inline double mvn_logpdf(const Vector& x, const Vector& mu, const SpdMatrix& sigma) {
  detail::require_same_dim(x.size(), mu.size());
  detail::require_same_dim(x.size(), sigma.dim());
  const double p = static_cast<double>(x.size());
  return -0.5 * p * std::log(2.0 * boost::math::constants::pi<double>()) - 0.5 * sigma.log_det() -
         0.5 * sigma.quad_inverse(x - mu);
}

/// Multivariate Student-t with location `loc`, scale matrix `scale`, `df` degrees of freedom.
inline double mvt_logpdf(const Vector& x, const Vector& loc, const SpdMatrix& scale, double df) {
  detail::require_same_dim(x.size(), loc.size());
  detail::require_same_dim(x.size(), scale.dim());
  if (!(df > 0.0)) throw DomainError("Student-t degrees of freedom must be positive");
  const double p = static_cast<double>(x.size());
  const double delta = scale.quad_inverse(x - loc);
  return boost::math::lgamma(0.5 * (df + p)) - boost::math::lgamma(0.5 * df) -
         0.5 * p * std::log(df * boost::math::constants::pi<double>()) - 0.5 * scale.log_det() -
         0.5 * (df + p) * std::log1p(delta / df);
}

}  // namespace ivstat
