#include "grasspod/grassmann.hpp"

#include "grasspod/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace grasspod {
namespace {

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw NonFiniteError(std::string(what) + " contains non-finite entries");
  }
}

void require_same_shape(const PodBasis& a, const PodBasis& b) {
  if (a.n() != b.n() || a.r() != b.r()) {
    throw DimensionError("bases live on different Grassmannians: (" + std::to_string(a.n()) +
                         "," + std::to_string(a.r()) + ") vs (" + std::to_string(b.n()) + "," +
                         std::to_string(b.r()) + ")");
  }
}

}  // namespace

void normalize_signs(Matrix& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    Index best = 0;
    double best_abs = -1.0;
    for (Index i = 0; i < m.rows(); ++i) {
      const double a = std::abs(m(i, j));
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (m(best, j) < 0.0) m.col(j) *= -1.0;
  }
}

PodBasis::PodBasis(Matrix m, double tol) : matrix_(std::move(m)) {
  if (matrix_.cols() < 1 || matrix_.cols() >= matrix_.rows()) {
    throw DimensionError("PodBasis requires 1 <= r < n, got n=" + std::to_string(matrix_.rows()) +
                         " r=" + std::to_string(matrix_.cols()));
  }
  require_finite(matrix_, "PodBasis");
  const Matrix gram = matrix_.transpose() * matrix_;
  const double dev = (gram - Matrix::Identity(matrix_.cols(), matrix_.cols())).cwiseAbs().maxCoeff();
  if (dev > tol) {
    throw InvalidArgument("PodBasis columns are not orthonormal (max |Phi^T Phi - I| = " +
                          std::to_string(dev) + ")");
  }
  normalize_signs(matrix_);
}

PodBasis PodBasis::orthonormalize(const Matrix& m) {
  if (m.cols() < 1 || m.cols() >= m.rows()) {
    throw DimensionError("orthonormalize requires 1 <= r < n");
  }
  require_finite(m, "matrix to orthonormalize");
  Eigen::HouseholderQR<Matrix> qr(m);
  const Matrix& packed = qr.matrixQR();
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  for (Index k = 0; k < m.cols(); ++k) {
    if (std::abs(packed(k, k)) <= 1e-13 * scale) {
      throw InvalidArgument("matrix is rank deficient; cannot orthonormalize");
    }
  }
  Matrix q = qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
  return PodBasis(std::move(q));
}

PodBasis exp_map(const PodBasis& base, const HorizontalLift& lift) {
  const Matrix& phi = base.matrix();
  const Matrix& z = lift.z;
  if (z.rows() != phi.rows() || z.cols() != phi.cols()) {
    throw DimensionError("lift shape does not match base");
  }
  require_finite(z, "horizontal lift");
  if (z.isZero(0.0)) return base;

  Eigen::JacobiSVD<Matrix, Eigen::ColPivHouseholderQRPreconditioner> svd(
      z, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector s = svd.singularValues();
  const Matrix moved = phi * svd.matrixV() * s.array().cos().matrix().asDiagonal() +
                       svd.matrixU() * s.array().sin().matrix().asDiagonal();
  return PodBasis::orthonormalize(moved);
}

Vector principal_angles(const PodBasis& a, const PodBasis& b) {
  require_same_shape(a, b);
  const Index r = a.r();
  const Matrix overlap = a.matrix().transpose() * b.matrix();
  // Cosines lose accuracy near zero angle, so small angles come from the sines
  // of the component of b orthogonal to a.
  const Vector cosines = Eigen::JacobiSVD<Matrix>(overlap).singularValues();
  const Matrix residual = b.matrix() - a.matrix() * overlap;
  const Vector sines =
      Eigen::JacobiSVD<Matrix, Eigen::ColPivHouseholderQRPreconditioner>(residual).singularValues();

  Vector angles(r);
  for (Index i = 0; i < r; ++i) {
    const double c = std::clamp(cosines(i), -1.0, 1.0);
    const double s = std::clamp(i < sines.size() ? sines(sines.size() - 1 - i) : 0.0, 0.0, 1.0);
    angles(i) = c >= std::numbers::sqrt2 / 2.0 ? std::asin(s) : std::acos(c);
  }
  std::sort(angles.begin(), angles.end());
  return angles;
}

double geodesic_distance(const PodBasis& a, const PodBasis& b) {
  return principal_angles(a, b).norm();
}

HorizontalLift log_map(const PodBasis& base, const PodBasis& target) {
  require_same_shape(base, target);
  const Vector angles = principal_angles(base, target);
  if (angles.maxCoeff() >= kHalfPi - kCutLocusMargin) {
    throw CutLocusError("target lies on or beyond the cut locus (largest principal angle " +
                        std::to_string(angles.maxCoeff()) + ")");
  }
  const Matrix& phi = base.matrix();
  const Matrix& psi = target.matrix();
  const Matrix overlap = phi.transpose() * psi;
  Eigen::PartialPivLU<Matrix> lu(overlap.transpose());
  if (std::abs(lu.determinant()) < 1e-300) {
    throw CutLocusError("Phi^T Psi is singular");
  }
  const Matrix normal = psi - phi * overlap;
  const Matrix m = lu.solve(normal.transpose()).transpose();

  Eigen::JacobiSVD<Matrix, Eigen::ColPivHouseholderQRPreconditioner> svd(
      m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector theta = svd.singularValues().array().atan().matrix();
  return HorizontalLift{svd.matrixU() * theta.asDiagonal() * svd.matrixV().transpose()};
}

}  // namespace grasspod
