#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ivstat/interval.hpp"
#include "ivstat/json.hpp"

using namespace ivstat;

namespace {

IntervalDataset univariate(std::initializer_list<std::pair<double, double>> rows) {
  std::vector<IntervalObservation> obs;
  for (auto [a, b] : rows) obs.push_back({{Interval(a, b)}});
  return IntervalDataset(obs, {"X1"});
}

// Mean and variance of an equal-weight mixture of uniforms, by midpoint-rule
// integration of the mixture density.
std::pair<double, double> mixture_moments_1d(const std::vector<std::pair<double, double>>& intervals) {
  const int steps = 200000;
  double m1 = 0.0, m2 = 0.0;
  for (auto [a, b] : intervals) {
    if (a == b) {
      m1 += a;
      m2 += a * a;
      continue;
    }
    const double h = (b - a) / steps;
    for (int k = 0; k < steps; ++k) {
      const double x = a + (k + 0.5) * h;
      m1 += x * h / (b - a);
      m2 += x * x * h / (b - a);
    }
  }
  const double n = static_cast<double>(intervals.size());
  m1 /= n;
  m2 /= n;
  return {m1, m2 - m1 * m1};
}

// Covariance of the mixture where each rectangle contributes a uniform
// distribution along its main diagonal from (a_j, a_k) to (b_j, b_k).
double diagonal_mixture_cov(const IntervalDataset& data, std::size_t j, std::size_t k) {
  const int steps = 100000;
  double ex = 0.0, ey = 0.0, exy = 0.0;
  for (const auto& obs : data.observations()) {
    const auto& x = obs.coords[j];
    const auto& y = obs.coords[k];
    for (int s = 0; s < steps; ++s) {
      const double t = (s + 0.5) / steps;
      const double px = x.lower() + t * x.width();
      const double py = y.lower() + t * y.width();
      ex += px / steps;
      ey += py / steps;
      exy += px * py / steps;
    }
  }
  const double n = static_cast<double>(data.n());
  return exy / n - (ex / n) * (ey / n);
}

}  // namespace

TEST(Interval, RejectsReversedAndNonFinite) {
  EXPECT_THROW(Interval(2.0, 1.0), DomainError);
  EXPECT_THROW(Interval(0.0, INFINITY), DomainError);
  EXPECT_TRUE(Interval(5.0, 5.0).degenerate());
}

TEST(ParseDataset, MedicalFirstRow) {
  const auto d = parse_dataset("a_1,b_1,a_2,b_2,a_3,b_3\n58,90,118,173,63,102\n");
  EXPECT_EQ(d.n(), 1u);
  EXPECT_EQ(d.p(), 3u);
  EXPECT_EQ(d[0].coords[1].lower(), 118.0);
  EXPECT_EQ(d[0].coords[2].upper(), 102.0);
}

TEST(ParseDataset, DegenerateAccepted) {
  const auto d = parse_dataset("a_1,b_1\n5,5\n");
  EXPECT_TRUE(d[0].coords[0].degenerate());
}

TEST(ParseDataset, ErrorsNameRowAndColumn) {
  auto message = [](const std::string& text) {
    try {
      parse_dataset(text);
    } catch (const ParseError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_EQ(message("a_1,b_1\n9,3\n"), "lower > upper at row 1, var 1");
  EXPECT_NE(message("a_1,b_1,a_2\n1,2,3\n").find("odd column count"), std::string::npos);
  EXPECT_EQ(message("a_1,b_1\n1,2\n1,x\n"), "malformed number 'x' at row 2, column 2");
  EXPECT_NE(message("a_1,b_1\n1,2,3\n").find("row 1: expected 2 columns"), std::string::npos);
  EXPECT_EQ(message("a_1,b_1\n"), "no data rows");
  EXPECT_EQ(message(""), "empty input: missing header");
}

TEST(ParseDataset, RoundTripIsBitIdentical) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  std::vector<IntervalObservation> obs;
  for (int i = 0; i < 50; ++i) {
    IntervalObservation o;
    for (int j = 0; j < 3; ++j) {
      const double a = u(gen);
      o.coords.emplace_back(a, a + std::abs(u(gen)));
    }
    obs.push_back(o);
  }
  const IntervalDataset d(obs, {"X1", "X2", "X3"});
  const auto text = serialize_dataset(d);
  const auto back = parse_dataset(text);
  ASSERT_EQ(back.n(), d.n());
  for (std::size_t i = 0; i < d.n(); ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_EQ(back[i].coords[j].lower(), d[i].coords[j].lower());
      EXPECT_EQ(back[i].coords[j].upper(), d[i].coords[j].upper());
    }
  EXPECT_EQ(serialize_dataset(back), text);
}

TEST(InternalRep, Midpoints) {
  IntervalObservation car{{Interval(260.5, 460.0)}};
  EXPECT_DOUBLE_EQ(internal_mean(car)(0), 360.25);
  IntervalObservation med{{Interval(58, 90), Interval(118, 173), Interval(63, 102)}};
  const Vector m = internal_mean(med);
  EXPECT_DOUBLE_EQ(m(0), 74.0);
  EXPECT_DOUBLE_EQ(m(1), 145.5);
  EXPECT_DOUBLE_EQ(m(2), 82.5);
  IntervalObservation point{{Interval(3.25, 3.25)}};
  EXPECT_EQ(internal_mean(point)(0), 3.25);
}

TEST(InternalRep, SpreadIsRankOneWidthProduct) {
  IntervalObservation obs{{Interval(58, 90), Interval(118, 173)}};
  const Matrix s = internal_spread(obs);
  EXPECT_NEAR(s(0, 0), 32.0 * 32.0 / 12.0, 1e-12);
  EXPECT_NEAR(s(0, 1), 32.0 * 55.0 / 12.0, 1e-12);
  EXPECT_NEAR(s(1, 1), 55.0 * 55.0 / 12.0, 1e-12);
  EXPECT_NEAR(s(0, 0), 85.3333, 1e-4);
  EXPECT_NEAR(s(0, 1), 146.6667, 1e-4);
  EXPECT_NEAR(s(1, 1), 252.0833, 1e-4);
  EXPECT_EQ(s(0, 1), s(1, 0));

  IntervalObservation unit{{Interval(0.0, std::sqrt(12.0))}};
  EXPECT_NEAR(internal_spread(unit)(0, 0), 1.0, 1e-15);
  IntervalObservation flat{{Interval(1, 1), Interval(2, 2)}};
  EXPECT_TRUE(internal_spread(flat).isZero(0.0));
}

TEST(InternalRep, SpreadMatchesWidthOuterProductOnRandomData) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 50.0);
  for (int t = 0; t < 100; ++t) {
    IntervalObservation obs;
    Vector w(4);
    for (int j = 0; j < 4; ++j) {
      const double a = u(gen);
      w(j) = u(gen);
      obs.coords.emplace_back(a, a + w(j));
    }
    const Matrix s = internal_spread(obs);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) EXPECT_NEAR(s(i, j), obs.coords[i].width() * obs.coords[j].width() / 12.0, 1e-9);
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-9 * es.eigenvalues().maxCoeff());
  }
}

TEST(Describe, UniformMoments) {
  const auto one = describe_mean_var(univariate({{0, 1}}), 0);
  EXPECT_DOUBLE_EQ(one.mean, 0.5);
  EXPECT_NEAR(one.variance, 1.0 / 12.0, 1e-15);
  const auto point = describe_mean_var(univariate({{7, 7}}), 0);
  EXPECT_EQ(point.mean, 7.0);
  EXPECT_EQ(point.variance, 0.0);
}

TEST(Describe, MatchesMixtureIntegrationOracle) {
  const std::vector<std::vector<std::pair<double, double>>> cases = {
      {{0, 2}, {2, 4}}, {{1, 3}, {-2, 5}, {4, 4}}, {{10, 11}, {12, 20}, {0, 0.5}, {3, 9}}};
  for (const auto& c : cases) {
    std::vector<IntervalObservation> obs;
    for (auto [a, b] : c) obs.push_back({{Interval(a, b)}});
    const auto got = describe_mean_var(IntervalDataset(obs, {"X1"}), 0);
    const auto [mean, var] = mixture_moments_1d(c);
    EXPECT_NEAR(got.mean, mean, 1e-9);
    EXPECT_NEAR(got.variance, var, 1e-7);
  }
  const auto two = describe_mean_var(univariate({{0, 2}, {2, 4}}), 0);
  EXPECT_DOUBLE_EQ(two.mean, 2.0);
  EXPECT_NEAR(two.variance, 4.0 / 3.0, 1e-12);
}

TEST(Describe, CovarianceMatchesDiagonalMixtureOracle) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<IntervalObservation> obs;
  for (int i = 0; i < 12; ++i) {
    IntervalObservation o;
    for (int j = 0; j < 3; ++j) {
      const double a = u(gen);
      o.coords.emplace_back(a, a + u(gen));
    }
    obs.push_back(o);
  }
  const IntervalDataset d(obs, {"X1", "X2", "X3"});
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t k = 0; k < 3; ++k) {
      if (j == k) continue;
      EXPECT_NEAR(describe_cov(d, j, k), diagonal_mixture_cov(d, j, k), 1e-6);
      EXPECT_DOUBLE_EQ(describe_cov(d, j, k), describe_cov(d, k, j));
    }
}

TEST(Describe, CovarianceSpecialCases) {
  const IntervalDataset same({{{Interval(0, 2), Interval(0, 2)}}, {{Interval(2, 4), Interval(2, 4)}}}, {"X1", "X2"});
  EXPECT_NEAR(describe_cov(same, 0, 1), describe_mean_var(same, 0).variance, 1e-12);
  EXPECT_NEAR(describe_cov(same, 0, 1), 4.0 / 3.0, 1e-12);

  const IntervalDataset constant({{{Interval(0, 2), Interval(3, 3)}}, {{Interval(5, 9), Interval(3, 3)}}},
                                 {"X1", "X2"});
  EXPECT_NEAR(describe_cov(constant, 0, 1), 0.0, 1e-12);
}

TEST(Describe, DegenerateDataReducesToClassicalStatistics) {
  const std::vector<double> xs = {1.5, -2.0, 4.25, 9.0, 0.0};
  std::vector<IntervalObservation> obs;
  for (double x : xs) obs.push_back({{Interval(x, x)}});
  const auto mv = describe_mean_var(IntervalDataset(obs, {"X1"}), 0);
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= xs.size();
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= xs.size();
  EXPECT_NEAR(mv.mean, mean, 1e-14);
  EXPECT_NEAR(mv.variance, var, 1e-12);
}

TEST(Describe, MeanEqualsAverageMidpoint) {
  const auto d = parse_dataset("a_1,b_1,a_2,b_2\n1,3,10,20\n2,8,11,11\n-4,0,0,1\n");
  const auto reps = to_internal(d);
  for (std::size_t j = 0; j < 2; ++j) {
    double avg = 0.0;
    for (const auto& r : reps) avg += r.theta1(static_cast<Eigen::Index>(j));
    EXPECT_NEAR(describe_mean_var(d, j).mean, avg / 3.0, 1e-14);
  }
}

TEST(InternalRep, JsonLayout) {
  IntervalObservation obs{{Interval(0, 2), Interval(1, 4)}};
  const auto j = to_json(to_internal(obs));
  EXPECT_EQ(j["theta1"][1].get<double>(), 2.5);
  EXPECT_DOUBLE_EQ(j["theta2"][0][1].get<double>(), 6.0 / 12.0);
  EXPECT_DOUBLE_EQ(j["theta2"][1][1].get<double>(), 9.0 / 12.0);
}
