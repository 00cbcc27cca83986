#pragma once

#include "grasspod/grassmann.hpp"

#include <string>

namespace grasspod {

/// Snapshot matrix D(theta): one column per time instance.
struct SnapshotMatrix {
  Matrix data;
  Vector parameter;
  std::string label;

  /// Throws DimensionError / NonFiniteError when the invariants fail.
  void validate() const;
};

struct PodResult {
  PodBasis basis;
  Vector singular_values;  ///< descending, length min(n, n_T)
  double energy_captured = 0.0;

  /// sqrt(sum_{i>r} s_i^2 / sum s_i^2): the best relative error any rank-r
  /// basis can achieve on the snapshots it came from.
  double truncation_floor() const;
};

/// First r left singular vectors of the snapshot matrix.
PodResult compute_pod(const SnapshotMatrix& snapshots, Index rank);
PodResult compute_pod(const Matrix& data, Index rank);

/// ||D - Phi Phi^T D||_F
double projection_error(const Matrix& data, const PodBasis& basis);

/// Smallest rank whose captured energy reaches `threshold` in (0, 1].
Index rank_for_energy(const Vector& singular_values, double threshold);

/// Subtract the temporal mean from every row. Off by default in the harness.
Matrix center_snapshots(const Matrix& data);

}  // namespace grasspod
