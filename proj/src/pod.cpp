#include "grasspod/pod.hpp"

#include "grasspod/error.hpp"

#include <algorithm>
#include <cmath>

namespace grasspod {

void SnapshotMatrix::validate() const {
  if (data.rows() < 1 || data.cols() < 1) {
    throw DimensionError("snapshot matrix must be at least 1x1");
  }
  if (!data.allFinite()) {
    throw NonFiniteError("snapshot matrix '" + label + "' has non-finite entries");
  }
}

double PodResult::truncation_floor() const {
  const double total = singular_values.squaredNorm();
  if (total == 0.0) return 0.0;
  const Index r = basis.r();
  const double tail = singular_values.tail(singular_values.size() - r).squaredNorm();
  return std::sqrt(tail / total);
}

PodResult compute_pod(const SnapshotMatrix& snapshots, Index rank) {
  snapshots.validate();
  return compute_pod(snapshots.data, rank);
}

PodResult compute_pod(const Matrix& data, Index rank) {
  if (!data.allFinite()) throw NonFiniteError("snapshot matrix has non-finite entries");
  const Index k = std::min(data.rows(), data.cols());
  if (rank < 1 || rank > k) {
    throw InvalidArgument("rank " + std::to_string(rank) + " outside [1, min(n, n_T)=" +
                          std::to_string(k) + "]");
  }
  if (rank >= data.rows()) {
    throw InvalidArgument("rank must be below the state dimension n");
  }
  Eigen::BDCSVD<Matrix> svd(data, Eigen::ComputeThinU);
  PodResult out;
  out.singular_values = svd.singularValues();
  Matrix u = svd.matrixU().leftCols(rank);
  out.basis = PodBasis(std::move(u));
  const double total = out.singular_values.squaredNorm();
  out.energy_captured = total > 0.0 ? out.singular_values.head(rank).squaredNorm() / total : 1.0;
  return out;
}

double projection_error(const Matrix& data, const PodBasis& basis) {
  if (data.rows() != basis.n()) {
    throw DimensionError("snapshot rows do not match basis dimension");
  }
  const Matrix& phi = basis.matrix();
  return (data - phi * (phi.transpose() * data)).norm();
}

Index rank_for_energy(const Vector& singular_values, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw InvalidArgument("energy threshold must lie in (0, 1]");
  }
  const double total = singular_values.squaredNorm();
  if (total == 0.0) return 1;
  double acc = 0.0;
  for (Index i = 0; i < singular_values.size(); ++i) {
    acc += singular_values(i) * singular_values(i);
    if (acc / total >= threshold) return i + 1;
  }
  return singular_values.size();
}

Matrix center_snapshots(const Matrix& data) {
  return data.colwise() - data.rowwise().mean();
}

}  // namespace grasspod
