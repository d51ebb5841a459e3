#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ivstat/error.hpp"

namespace ivstat {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

constexpr double kSymmetryTolerance = 1e-10;
constexpr double kPivotTolerance = 1e-12;

inline bool is_symmetric(const Matrix& m, double rel_tol = kSymmetryTolerance) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(m.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = j + 1; i < m.rows(); ++i)
      if (std::abs(m(i, j) - m(j, i)) > rel_tol * scale) return false;
  return true;
}

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

/// Lower Cholesky factor, or nullopt when a pivot falls below
/// kPivotTolerance times the largest diagonal entry.
inline std::optional<Matrix> cholesky_lower(const Matrix& a) {
  const Eigen::Index p = a.rows();
  if (p == 0 || a.cols() != p) return std::nullopt;
  const double max_diag = a.diagonal().maxCoeff();
  if (!(max_diag > 0.0) || !std::isfinite(max_diag)) return std::nullopt;
  const double floor = kPivotTolerance * max_diag;
  Matrix l = Matrix::Zero(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    double pivot = a(j, j) - l.row(j).head(j).squaredNorm();
    if (!(pivot > floor)) return std::nullopt;
    l(j, j) = std::sqrt(pivot);
    for (Eigen::Index i = j + 1; i < p; ++i)
      l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
  }
  return l;
}

/// Symmetric positive-definite matrix with its Cholesky factor cached.
/// Construction fails loudly rather than clamping eigenvalues.
class SpdMatrix {
 public:
  explicit SpdMatrix(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() == 0) throw NumericalError("matrix is not square");
    if (!m.allFinite()) throw NumericalError("matrix has non-finite entries");
    if (!is_symmetric(m)) throw NumericalError("matrix is not symmetric");
    matrix_ = symmetrize(m);
    auto l = cholesky_lower(matrix_);
    if (!l) throw NumericalError("matrix is not positive definite");
    lower_ = std::move(*l);
  }

  /// nullopt instead of throwing.
  static std::optional<SpdMatrix> try_make(const Matrix& m) {
    try {
      return SpdMatrix(m);
    } catch (const NumericalError&) {
      return std::nullopt;
    }
  }

  const Matrix& matrix() const { return matrix_; }
  const Matrix& lower() const { return lower_; }
  Eigen::Index dim() const { return matrix_.rows(); }

  double log_det() const { return 2.0 * lower_.diagonal().array().log().sum(); }

  Vector solve(const Vector& b) const {
    Vector x = b;
    lower_.triangularView<Eigen::Lower>().solveInPlace(x);
    lower_.transpose().triangularView<Eigen::Upper>().solveInPlace(x);
    return x;
  }

  Matrix solve(const Matrix& b) const {
    Matrix x = b;
    lower_.triangularView<Eigen::Lower>().solveInPlace(x);
    lower_.transpose().triangularView<Eigen::Upper>().solveInPlace(x);
    return x;
  }

  Matrix inverse() const { return symmetrize(solve(Matrix(Matrix::Identity(dim(), dim())))); }

  /// L^{-1} B L^{-T}
  Matrix whiten(const Matrix& b) const {
    auto tri = lower_.triangularView<Eigen::Lower>();
    Matrix half = tri.solve(b);
    Matrix full = half.transpose();
    tri.solveInPlace(full);
    return symmetrize(full);
  }

  /// x^T A^{-1} x
  double quad_inverse(const Vector& x) const {
    Vector z = x;
    lower_.triangularView<Eigen::Lower>().solveInPlace(z);
    return z.squaredNorm();
  }

 private:
  Matrix matrix_;
  Matrix lower_;
};

inline std::size_t vech_size(std::size_t p) { return p * (p + 1) / 2; }

/// Half-vectorization: lower triangle stacked column by column.
inline Vector vech(const Matrix& m) {
  const Eigen::Index p = m.rows();
  Vector out(static_cast<Eigen::Index>(vech_size(static_cast<std::size_t>(p))));
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = j; i < p; ++i) out(k++) = m(i, j);
  return out;
}

inline Matrix unvech(const Vector& v, Eigen::Index p) {
  if (static_cast<std::size_t>(v.size()) != vech_size(static_cast<std::size_t>(p)))
    throw DomainError("vech length does not match dimension");
  Matrix m(p, p);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = j; i < p; ++i) {
      m(i, j) = v(k);
      m(j, i) = v(k);
      ++k;
    }
  return m;
}

/// Row/column index pairs in vech order.
inline std::vector<std::pair<Eigen::Index, Eigen::Index>> vech_indices(Eigen::Index p) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> out;
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = j; i < p; ++i) out.emplace_back(i, j);
  return out;
}

/// Neumaier-compensated running sum.
class KahanSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace ivstat
