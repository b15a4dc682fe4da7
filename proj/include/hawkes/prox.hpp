#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace hawkes::prox {

// Entrywise soft-threshold: sign(x) * max(|x| - t, 0).
template <typename Derived>
typename Derived::PlainObject soft_threshold(const Eigen::MatrixBase<Derived>& x, typename Derived::Scalar t) {
  using Scalar = typename Derived::Scalar;
  return x.unaryExpr([t](Scalar v) {
    const Scalar mag = std::abs(v) - t;
    return mag > Scalar(0) ? (v > Scalar(0) ? mag : -mag) : Scalar(0);
  });
}

// Row-wise group shrinkage: each row r becomes max(0, 1 - t / ||r||) * r.
template <typename Derived>
typename Derived::PlainObject row_shrink(const Eigen::MatrixBase<Derived>& x, typename Derived::Scalar t) {
  using Scalar = typename Derived::Scalar;
  typename Derived::PlainObject out = x;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const Scalar norm = out.row(r).norm();
    out.row(r) *= norm > t ? Scalar(1) - t / norm : Scalar(0);
  }
  return out;
}

// Singular-value soft-threshold (proximal map of t * nuclear norm).
template <typename Derived>
typename Derived::PlainObject singular_value_threshold(const Eigen::MatrixBase<Derived>& x,
                                                       typename Derived::Scalar t) {
  using Plain = typename Derived::PlainObject;
  Eigen::JacobiSVD<Plain> svd(x.eval(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto shrunk = (svd.singularValues().array() - t).max(typename Derived::Scalar(0)).matrix();
  return svd.matrixU() * shrunk.asDiagonal() * svd.matrixV().transpose();
}

template <typename Derived>
typename Derived::Scalar l1_norm(const Eigen::MatrixBase<Derived>& x) {
  return x.cwiseAbs().sum();
}

template <typename Derived>
typename Derived::Scalar group_norm(const Eigen::MatrixBase<Derived>& x) {
  return x.rowwise().norm().sum();
}

template <typename Derived>
typename Derived::Scalar nuclear_norm(const Eigen::MatrixBase<Derived>& x) {
  using Plain = typename Derived::PlainObject;
  return Eigen::JacobiSVD<Plain>(x.eval()).singularValues().sum();
}

}  // namespace hawkes::prox
