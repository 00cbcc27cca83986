#include "grasspod/cxgboost.hpp"
#include "grasspod/error.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace grasspod;
using namespace testing;

namespace {

bool feasible(const LeafProblem& p, const Vector& w, double radius, double slack = 0.0) {
  for (Index i = 0; i < p.centers.cols(); ++i) {
    if ((w + p.centers.col(i)).norm() > radius + slack) return false;
  }
  return true;
}

/// Exhaustive search over a square window with the given spacing.
double grid_min(const LeafProblem& p, double radius, Vector& best, double cx, double cy,
                double half_width, double step) {
  double fbest = std::numeric_limits<double>::infinity();
  const int steps = static_cast<int>(std::ceil(half_width / step));
  Vector w(2);
  for (int i = -steps; i <= steps; ++i) {
    for (int j = -steps; j <= steps; ++j) {
      w << cx + i * step, cy + j * step;
      if (!feasible(p, w, radius)) continue;
      const double f = leaf_objective(p, w);
      if (f < fbest) {
        fbest = f;
        best = w;
      }
    }
  }
  return fbest;
}

}  // namespace

TEST_SUITE("qcqp") {
  TEST_CASE("zero gradient gives zero weight") {
    LeafProblem p{Vector::Zero(3), 2.0, Matrix::Zero(3, 2), 0.01};
    CHECK(solve_leaf_qcqp(p, kHalfPi).norm() == 0.0);
  }

  TEST_CASE("single ball at the origin") {
    LeafProblem p{Vector{{-10.0, 0.0}}, 1.0, Matrix::Zero(2, 1), 0.0};
    const Vector w = solve_leaf_qcqp(p, kHalfPi);
    CHECK(w(0) == doctest::Approx(kHalfPi).epsilon(1e-12));
    CHECK(std::abs(w(1)) < 1e-12);
    Vector g(2);
    const double oracle = grid_min(p, kHalfPi, g, 0.0, 0.0, kHalfPi, 1e-3);
    CHECK(leaf_objective(p, w) <= oracle + 1e-12);
  }

  TEST_CASE("lens intersection of two balls") {
    Matrix centers(2, 2);
    centers << 1.2, -1.2, 0.0, 0.0;
    LeafProblem p{Vector{{0.0, -3.0}}, 2.0, centers, 0.0};
    const Vector w = solve_leaf_qcqp(p, kHalfPi);
    CHECK(feasible(p, w, kHalfPi, 1e-9));
    Vector g(2);
    double oracle = grid_min(p, kHalfPi, g, 0.0, 0.0, kHalfPi, 1e-3);
    CHECK(leaf_objective(p, w) <= oracle + 1e-6);
    for (double step : {1e-5, 1e-7, 1e-9}) {
      oracle = grid_min(p, kHalfPi, g, g(0), g(1), 200 * step, step);
    }
    CHECK(std::abs(leaf_objective(p, w) - oracle) < 1e-6);
    // By symmetry the optimum sits on the y axis at the lens tip.
    CHECK(std::abs(w(0)) < 1e-8);
    CHECK(w(1) == doctest::Approx(std::sqrt(kHalfPi * kHalfPi - 1.44)).epsilon(1e-8));
  }

  TEST_CASE("interior optimum is returned verbatim") {
    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
      LeafProblem p{random_vector(4, rng) * 0.1, 3.0, random_matrix(4, 3, rng) * 0.2, 0.01};
      const Vector w = solve_leaf_qcqp(p, kHalfPi);
      const Vector expect = -p.g_sum / (p.h_scale + p.lambda);
      CHECK(w == expect);
    }
  }

  TEST_CASE("active constraints in higher dimension are locally optimal") {
    Rng rng(32);
    for (int trial = 0; trial < 20; ++trial) {
      const Index dim = 6;
      Matrix centers = random_matrix(dim, 4, rng);
      for (Index i = 0; i < centers.cols(); ++i) centers.col(i) *= 1.2 / centers.col(i).norm();
      LeafProblem p{random_vector(dim, rng) * 20.0, 2.0, centers, 0.01};
      const Vector w = solve_leaf_qcqp(p, kHalfPi);
      REQUIRE(feasible(p, w, kHalfPi, 1e-9));
      const double f = leaf_objective(p, w);
      for (int k = 0; k < 2000; ++k) {
        const Vector cand = w + random_vector(dim, rng) * 1e-3;
        if (feasible(p, cand, kHalfPi)) CHECK(f <= leaf_objective(p, cand) + 1e-10);
      }
    }
  }

  TEST_CASE("invalid problems") {
    LeafProblem p{Vector{{1.0}}, 0.0, Matrix::Zero(1, 1), 0.0};
    CHECK_THROWS_AS(solve_leaf_qcqp(p, kHalfPi), InvalidArgument);
    LeafProblem outside{Vector{{1.0}}, 1.0, Matrix::Constant(1, 1, 2.0), 0.0};
    CHECK_THROWS_AS(solve_leaf_qcqp(outside, kHalfPi), InvalidArgument);
    LeafProblem mismatch{Vector{{1.0, 0.0}}, 1.0, Matrix::Zero(3, 1), 0.0};
    CHECK_THROWS_AS(solve_leaf_qcqp(mismatch, kHalfPi), DimensionError);
  }
}
