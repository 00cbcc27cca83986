#pragma once

#include "grasspod/grassmann.hpp"

#include <string>
#include <vector>

namespace grasspod {

/// Column-major stacking of an n x r matrix.
Vector vec(const Matrix& z);
/// Inverse of vec.
Matrix mat(const Vector& v, Index n, Index r);

/// Euclidean chart of G(r, n) around a reference basis Phi0.
///
/// The (nr - r) x nr matrix F has orthonormal rows spanning the null space of
/// blockdiag(phi_1^T, ..., phi_r^T). It is block diagonal: block i is the
/// Householder reflector that sends phi_i to a multiple of e_1, with its first
/// row removed. Only the r reflector vectors are stored, so applying F or F^T
/// costs O(nr) and F never has to be materialized for large n.
class Chart {
 public:
  Chart() = default;

  /// build_chart
  explicit Chart(PodBasis reference);

  /// Rebuild from serialized parts. The reflectors are taken verbatim.
  static Chart from_parts(PodBasis reference, Matrix reflectors);

  const PodBasis& reference() const { return reference_; }
  /// n x r; column i is the Householder vector of block i.
  const Matrix& reflectors() const { return reflectors_; }

  Index n() const { return reference_.n(); }
  Index r() const { return reference_.r(); }
  /// Embedding dimension nr - r.
  Index dim() const { return n() * r() - r(); }
  double radius() const { return kHalfPi; }

  /// F x for x of length nr.
  Vector apply_f(const Vector& x) const;
  /// F^T y for y of length nr - r.
  Vector apply_ft(const Vector& y) const;
  /// Dense F. Intended for tests and small problems only.
  Matrix dense_f() const;

 private:
  PodBasis reference_;
  Matrix reflectors_;
  Vector betas_;
};

/// y = F vec(Log(reference, basis)). Throws CutLocusError or OutOfChartError.
Vector embed(const Chart& chart, const PodBasis& basis);

/// Exp(reference, Mat(F^T y)). Throws BallViolationError if ||y|| > pi/2 + 1e-9.
PodBasis wrap_back(const Chart& chart, const Vector& y);

enum class ReferencePolicy { minimax, first, index };

ReferencePolicy parse_reference_policy(const std::string& name);
std::string to_string(ReferencePolicy policy);

struct ReferenceChoice {
  std::size_t index = 0;
  double max_distance = 0.0;          ///< max geodesic distance to the kept bases
  std::vector<std::size_t> excluded;  ///< bases left out of the chart (drop mode only)
};

/// Pick the chart center among `bases`. For `minimax`, brute force over all
/// candidates; ties go to the lowest index. Throws OutOfChartError with the
/// offending samples (by label when given, else by index) when the chosen
/// reference cannot embed every basis strictly inside the pi/2 ball.
///
/// With `drop_unreachable` those samples are listed in `excluded` instead, and
/// minimax first maximizes the number of bases kept.
ReferenceChoice select_reference(const std::vector<PodBasis>& bases, ReferencePolicy policy,
                                 std::size_t explicit_index = 0,
                                 const std::vector<std::string>& labels = {},
                                 bool drop_unreachable = false);

}  // namespace grasspod
