#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "c3i/error.hpp"

namespace c3i {

struct SymmetricEigen {
  Eigen::VectorXd values;   ///< descending
  Eigen::MatrixXd vectors;  ///< unit columns matching `values`
  int sweeps = 0;
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Stops once the off-diagonal Frobenius norm falls below
/// `tolerance * max(1, ||A||_F)`.
[[nodiscard]] inline SymmetricEigen jacobi_eigen(Eigen::MatrixXd a, double tolerance = 1e-12, int max_sweeps = 100) {
  const Eigen::Index n = a.rows();
  if (n != a.cols()) throw NumericalError("jacobi_eigen: matrix is not square");
  if (!a.allFinite()) throw NumericalError("jacobi_eigen: matrix has non-finite entries");
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, a.cwiseAbs().maxCoeff())) {
    throw NumericalError("jacobi_eigen: matrix is not symmetric");
  }
  a = 0.5 * (a + a.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double scale = std::max(1.0, a.norm());

  auto off_norm = [&] {
    double s = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) s += 2.0 * a(p, q) * a(p, q);
    return std::sqrt(s);
  };

  int sweep = 0;
  while (off_norm() > tolerance * scale) {
    if (sweep == max_sweeps) {
      throw NumericalError("jacobi_eigen: no convergence after " + std::to_string(sweep) + " sweeps");
    }
    ++sweep;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });
  SymmetricEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
    out.vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  out.sweeps = sweep;
  return out;
}

/// Greedy left-to-right selection of linearly independent columns.
/// A column is rejected when its component orthogonal to the already accepted
/// columns has relative norm below `tolerance`.
[[nodiscard]] inline std::vector<std::size_t> independent_columns(const Eigen::MatrixXd& x, double tolerance = 1e-7) {
  std::vector<std::size_t> keep;
  std::vector<Eigen::VectorXd> basis;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    Eigen::VectorXd c = x.col(j);
    const double norm = c.norm();
    if (norm == 0.0) continue;
    c /= norm;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) c -= b.dot(c) * b;
    const double r = c.norm();
    if (r < tolerance) continue;
    basis.push_back(c / r);
    keep.push_back(static_cast<std::size_t>(j));
  }
  return keep;
}

/// Columns scaled to unit Euclidean norm; zero columns are left as zeros.
[[nodiscard]] inline Eigen::MatrixXd unit_columns(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd out = x;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double n = x.col(j).norm();
    if (n > 0) out.col(j) /= n;
  }
  return out;
}

/// Condition number of X^T X after unit-norm column scaling.
[[nodiscard]] inline double gram_condition(const Eigen::MatrixXd& x) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(unit_columns(x));
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  const double smin = s(s.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  const double r = s(0) / smin;
  return r * r;
}

}  // namespace c3i
