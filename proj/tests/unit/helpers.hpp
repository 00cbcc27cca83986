#pragma once

#include "grasspod/grassmann.hpp"
#include "grasspod/rng.hpp"

#include <filesystem>
#include <string>

namespace testing {

using grasspod::Index;
using grasspod::Matrix;
using grasspod::PodBasis;
using grasspod::Rng;
using grasspod::Vector;

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

inline Matrix random_matrix(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Index k = 0; k < m.size(); ++k) m.data()[k] = uniform(rng, -1.0, 1.0);
  return m;
}

inline Vector random_vector(Index n, Rng& rng) { return random_matrix(n, 1, rng); }

inline PodBasis random_basis(Index n, Index r, Rng& rng) {
  return PodBasis::orthonormalize(random_matrix(n, r, rng));
}

/// Horizontal lift at `base` with the given Frobenius norm.
inline Matrix random_lift(const PodBasis& base, double norm, Rng& rng) {
  const Matrix& p = base.matrix();
  Matrix z = random_matrix(p.rows(), p.cols(), rng);
  z -= p * (p.transpose() * z);
  return z * (norm / z.norm());
}

/// Basis at prescribed principal angles from `base`: Phi cos(T) + U sin(T)
/// with U orthonormal and orthogonal to Phi.
inline PodBasis basis_at_angles(const PodBasis& base, const Vector& angles, Rng& rng) {
  const Matrix& p = base.matrix();
  Matrix u = random_matrix(p.rows(), p.cols(), rng);
  u -= p * (p.transpose() * u);
  u = PodBasis::orthonormalize(u).matrix();
  Matrix out(p.rows(), p.cols());
  for (Index j = 0; j < p.cols(); ++j) {
    out.col(j) = std::cos(angles(j)) * p.col(j) + std::sin(angles(j)) * u.col(j);
  }
  return PodBasis(out);
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("grasspod_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
