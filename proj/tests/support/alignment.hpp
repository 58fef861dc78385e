#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "wirebend/geometry.hpp"

namespace oracle {

using wirebend::Vec3;

/// Root-mean-square distance after the optimal rigid alignment of b onto a (Kabsch).
inline double rigid_rmsd(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  const auto n = static_cast<Eigen::Index>(a.size());
  Eigen::Matrix3Xd A(3, n), B(3, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    A.col(i) << a[i].x, a[i].y, a[i].z;
    B.col(i) << b[i].x, b[i].y, b[i].z;
  }
  const Eigen::Vector3d ca = A.rowwise().mean();
  const Eigen::Vector3d cb = B.rowwise().mean();
  A.colwise() -= ca;
  B.colwise() -= cb;
  const Eigen::Matrix3d H = B * A.transpose();
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(H, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d D = Eigen::Matrix3d::Identity();
  if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0) D(2, 2) = -1.0;
  const Eigen::Matrix3d R = svd.matrixV() * D * svd.matrixU().transpose();
  const Eigen::Matrix3Xd diff = R * B - A;
  return std::sqrt(diff.colwise().squaredNorm().sum() / static_cast<double>(n));
}

}  // namespace oracle
