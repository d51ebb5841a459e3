#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "ivstat/estimation.hpp"
#include "ivstat/model.hpp"
#include "ivstat/parallel.hpp"

namespace ivstat {

inline double l2_loss(const Vector& mu, const Vector& mu_hat) {
  if (mu.size() != mu_hat.size()) throw DomainError("l2_loss: length mismatch");
  return (mu - mu_hat).squaredNorm();
}

/// Stein entropy loss tr(B_hat B^{-1}) - log|B_hat B^{-1}| - p.
/// Non-negative; zero iff b_hat == b_true.
inline double entropy_loss(const SpdMatrix& b_true, const SpdMatrix& b_hat) {
  if (b_true.dim() != b_hat.dim()) throw DomainError("entropy_loss: dimension mismatch");
  const Matrix ratio = b_true.whiten(b_hat.matrix());  // L^{-1} B_hat L^{-T}, same spectrum as B_hat B^{-1}
  return ratio.trace() - (b_hat.log_det() - b_true.log_det()) - static_cast<double>(b_true.dim());
}

enum class Estimator { kMl, kBayes };
enum class Target { kSigma, kLambda };

/// Which matrix plays the reference role in the entropy loss.
///  - kRiskOrder: the risk E[L(B_hat, B)] with the estimate in the reference
///    slot, i.e. tr(B B_hat^{-1}) - log|B B_hat^{-1}| - p. Posterior means are
///    the Bayes rules under this orientation.
///  - kTruthReference: entropy_loss(B, B_hat), truth in the reference slot.
enum class LossOrientation { kRiskOrder, kTruthReference };

inline const char* to_string(Estimator e) { return e == Estimator::kMl ? "ML" : "Bayes"; }
inline const char* to_string(Target t) { return t == Target::kSigma ? "Sigma" : "Lambda"; }
inline const char* to_string(LossOrientation o) {
  return o == LossOrientation::kRiskOrder ? "risk-order" : "truth-reference";
}

inline double oriented_loss(const SpdMatrix& truth, const SpdMatrix& estimate, LossOrientation orientation) {
  return orientation == LossOrientation::kRiskOrder ? entropy_loss(estimate, truth) : entropy_loss(truth, estimate);
}

struct RiskReport {
  Estimator estimator = Estimator::kMl;
  Target target = Target::kSigma;
  LossOrientation orientation = LossOrientation::kRiskOrder;
  double risk = 0.0;
  double mc_se = 0.0;
  std::size_t replications = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  ModelParams truth;
};

namespace detail {

inline Matrix estimate_target(const SufficientStats& stats, double m, Estimator estimator, Target target) {
  const ParamEstimate e = estimator == Estimator::kMl ? ml_estimate(stats, m) : bayes_estimate(stats, m);
  return target == Target::kSigma ? e.sigma_hat : e.lambda_hat;
}

inline void check_risk_args(std::size_t reps) {
  if (reps < 2) throw InputError("Monte Carlo risk needs at least two replications");
}

struct MeanSe {
  double mean;
  double se;
};

inline MeanSe mean_and_se(const std::vector<double>& values) {
  KahanSum sum;
  for (double v : values) sum.add(v);
  const double n = static_cast<double>(values.size());
  const double mean = sum.value() / n;
  KahanSum ss;
  for (double v : values) ss.add((v - mean) * (v - mean));
  return {mean, std::sqrt(ss.value() / (n - 1.0) / n)};
}

/// Per-replication losses for all requested estimators on shared datasets.
/// Replication r draws its data from rng.derive(r).
inline std::vector<std::vector<double>> replicate_losses(const ModelParams& truth, std::size_t n, std::size_t reps,
                                                         const RngStream& rng, Target target,
                                                         const std::vector<Estimator>& estimators,
                                                         LossOrientation orientation) {
  std::vector<std::vector<double>> losses(estimators.size(), std::vector<double>(reps));
  const SpdMatrix& reference = target == Target::kSigma ? truth.sigma : truth.lambda;
  parallel_for(reps, [&](std::size_t r) {
    const auto data = sample_model(truth, n, rng.derive(r));
    const SufficientStats stats = sufficient_stats(data);
    for (std::size_t k = 0; k < estimators.size(); ++k) {
      const Matrix est = estimate_target(stats, truth.m, estimators[k], target);
      auto spd = SpdMatrix::try_make(est);
      if (!spd)
        throw NumericalError(std::string("replication ") + std::to_string(r) + ": " + to_string(estimators[k]) +
                             " estimate of " + to_string(target) + " is not positive definite");
      losses[k][r] = oriented_loss(reference, *spd, orientation);
    }
  });
  return losses;
}

}  // namespace detail

/// Average entropy loss over `reps` synthetic datasets of size n.
inline RiskReport mc_risk(Estimator estimator, Target target, const ModelParams& truth, std::size_t n,
                          std::size_t reps, const RngStream& rng,
                          LossOrientation orientation = LossOrientation::kRiskOrder) {
  detail::check_risk_args(reps);
  const auto losses = detail::replicate_losses(truth, n, reps, rng, target, {estimator}, orientation);
  const auto [mean, se] = detail::mean_and_se(losses[0]);
  return RiskReport{estimator, target, orientation, mean, se, reps, n, rng.seed(), rng.stream(), truth};
}

/// log(n/(n-1)) and nm/(nm-p-1), evaluated as printed.
struct RiskGapClosedForm {
  double delta_sigma;
  double delta_lambda;
};

inline RiskGapClosedForm risk_gap_closed_form(std::size_t n, double m, std::size_t p) {
  if (n < 2) throw DomainError("risk gap needs n >= 2");
  const double nm = static_cast<double>(n) * m;
  if (!(nm > static_cast<double>(p) + 1.0)) throw DomainError("risk gap needs n*m > p + 1");
  const double nd = static_cast<double>(n);
  return {std::log(nd / (nd - 1.0)), nm / (nm - static_cast<double>(p) - 1.0)};
}

/// ML and Bayes risks on the same datasets, with the paired gap ML - Bayes.
struct RiskComparison {
  Target target = Target::kSigma;
  LossOrientation orientation = LossOrientation::kRiskOrder;
  double ml_risk = 0.0, ml_se = 0.0;
  double bayes_risk = 0.0, bayes_se = 0.0;
  double gap = 0.0, gap_se = 0.0;
  std::size_t replications = 0;
  std::size_t n = 0;
};

inline RiskComparison compare_risk(Target target, const ModelParams& truth, std::size_t n, std::size_t reps,
                                   const RngStream& rng, LossOrientation orientation = LossOrientation::kRiskOrder) {
  detail::check_risk_args(reps);
  const auto losses =
      detail::replicate_losses(truth, n, reps, rng, target, {Estimator::kMl, Estimator::kBayes}, orientation);
  std::vector<double> diff(reps);
  for (std::size_t r = 0; r < reps; ++r) diff[r] = losses[0][r] - losses[1][r];
  const auto ml = detail::mean_and_se(losses[0]);
  const auto bayes = detail::mean_and_se(losses[1]);
  const auto gap = detail::mean_and_se(diff);
  RiskComparison out;
  out.target = target;
  out.orientation = orientation;
  out.ml_risk = ml.mean;
  out.ml_se = ml.se;
  out.bayes_risk = bayes.mean;
  out.bayes_se = bayes.se;
  out.gap = gap.mean;
  out.gap_se = gap.se;
  out.replications = reps;
  out.n = n;
  return out;
}

}  // namespace ivstat
