#include <gtest/gtest.h>

#include <random>

#include "ivstat/linalg.hpp"

using namespace ivstat;

namespace {

Matrix random_spd(std::mt19937_64& gen, Eigen::Index p) {
  std::normal_distribution<double> z;
  Matrix a(p, p);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j) a(i, j) = z(gen);
  return a * a.transpose() + 0.5 * Matrix::Identity(p, p);
}

}  // namespace

TEST(SpdMatrix, RejectsIndefiniteAndAsymmetric) {
  Matrix m(2, 2);
  m << 1, 2, 2, 1;
  EXPECT_THROW(SpdMatrix{m}, NumericalError);
  m << 1, 0.5, 0.4, 1;
  EXPECT_THROW(SpdMatrix{m}, NumericalError);
  EXPECT_FALSE(SpdMatrix::try_make(Matrix::Zero(2, 2)).has_value());
  Matrix rank_one(2, 2);
  rank_one << 1, 2, 2, 4;
  EXPECT_FALSE(SpdMatrix::try_make(rank_one).has_value());
}

TEST(SpdMatrix, SolveInverseLogDetAgreeWithEigen) {
  std::mt19937_64 gen(1);
  for (Eigen::Index p = 1; p <= 5; ++p) {
    const Matrix a = random_spd(gen, p);
    const SpdMatrix s(a);
    const Vector b = Vector::LinSpaced(p, -1.0, 2.0);
    EXPECT_LT((a * s.solve(b) - b).norm(), 1e-10);
    EXPECT_LT((a * s.inverse() - Matrix::Identity(p, p)).norm(), 1e-10);
    EXPECT_NEAR(s.log_det(), std::log(a.determinant()), 1e-10);
    EXPECT_NEAR(s.quad_inverse(b), b.dot(a.inverse() * b), 1e-9);
    const Matrix w = s.whiten(a);
    EXPECT_LT((w - Matrix::Identity(p, p)).norm(), 1e-10);
  }
}

TEST(Vech, RoundTripAndOrder) {
  Matrix m(3, 3);
  m << 1, 2, 3, 2, 4, 5, 3, 5, 6;
  const Vector v = vech(m);
  ASSERT_EQ(v.size(), 6);
  EXPECT_EQ(v(0), 1);
  EXPECT_EQ(v(1), 2);
  EXPECT_EQ(v(2), 3);
  EXPECT_EQ(v(3), 4);
  EXPECT_EQ(unvech(v, 3), m);
  const auto idx = vech_indices(3);
  EXPECT_EQ(idx[2], (std::pair<Eigen::Index, Eigen::Index>{2, 0}));
  EXPECT_THROW(unvech(v, 2), DomainError);
}

TEST(KahanSum, RecoversLostLowOrderBits) {
  KahanSum s;
  s.add(1e16);
  for (int i = 0; i < 1000; ++i) s.add(1.0);
  s.add(-1e16);
  EXPECT_EQ(s.value(), 1000.0);
}
