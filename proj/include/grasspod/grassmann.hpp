#pragma once

#include <Eigen/Dense>

#include <numbers>

namespace grasspod {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kHalfPi = std::numbers::pi / 2.0;

/// Orthonormality tolerance for Stiefel representatives.
inline constexpr double kOrthonormalTol = 1e-10;

/// Log-map guard: angles at or above pi/2 - kCutLocusMargin are rejected.
inline constexpr double kCutLocusMargin = 1e-8;

/// An n x r matrix with orthonormal columns representing a point of G(r, n).
///
/// Construction validates orthonormality and applies the sign convention
/// (largest-magnitude entry of each column is non-negative, first such row
/// wins ties), so two equal matrices always compare bitwise equal.
class PodBasis {
 public:
  PodBasis() = default;

  /// Validates `m` and normalizes column signs. Throws DimensionError /
  /// NonFiniteError / InvalidArgument.
  explicit PodBasis(Matrix m, double tol = kOrthonormalTol);

  /// Thin-QR re-orthonormalization followed by sign normalization. `m` needs
  /// full column rank.
  static PodBasis orthonormalize(const Matrix& m);

  const Matrix& matrix() const { return matrix_; }
  Index n() const { return matrix_.rows(); }
  Index r() const { return matrix_.cols(); }

 private:
  Matrix matrix_;
};

/// Flip column signs in place so the largest |entry| of each column is >= 0.
void normalize_signs(Matrix& m);

/// n x r representative of a tangent vector at some base point.
struct HorizontalLift {
  Matrix z;

  /// sqrt(trace(Z^T Z)), in radians.
  double tangent_norm() const { return z.norm(); }
};

/// Riemannian exponential: span(Phi V cos(S) + U sin(S)) with Z = U S V^T.
PodBasis exp_map(const PodBasis& base, const HorizontalLift& lift);

/// Riemannian logarithm. Throws CutLocusError if the largest principal angle
/// is >= pi/2 - 1e-8.
HorizontalLift log_map(const PodBasis& base, const PodBasis& target);

/// Principal angles between span(a) and span(b), ascending, in [0, pi/2].
Vector principal_angles(const PodBasis& a, const PodBasis& b);

double geodesic_distance(const PodBasis& a, const PodBasis& b);

}  // namespace grasspod
