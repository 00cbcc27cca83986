#include "grasspod/error.hpp"
#include "grasspod/pod.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace grasspod;
using namespace testing;

TEST_SUITE("pod") {
  TEST_CASE("rank-one matrix") {
    const Matrix d{{1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}};
    const PodResult p = compute_pod(d, 1);
    CHECK(std::abs(p.basis.matrix()(0, 0)) == doctest::Approx(1.0));
    CHECK(p.singular_values(0) == doctest::Approx(1.0));
    CHECK(p.singular_values(1) == doctest::Approx(0.0));
    CHECK(p.truncation_floor() == 0.0);
    CHECK(p.energy_captured == doctest::Approx(1.0));
  }

  TEST_CASE("dominant column wins") {
    Matrix d = Matrix::Zero(4, 2);
    d(1, 0) = 3.0;
    d(2, 1) = 2.0;
    const PodResult p = compute_pod(d, 1);
    CHECK(p.basis.matrix()(1, 0) == doctest::Approx(1.0));
    CHECK(p.truncation_floor() == doctest::Approx(2.0 / std::sqrt(13.0)));
  }

  TEST_CASE("Eckart-Young against random candidates") {
    Rng rng(11);
    for (int trial = 0; trial < 10; ++trial) {
      const Matrix d = random_matrix(8, 12, rng);
      const PodResult p = compute_pod(d, 3);
      const double best = std::pow(projection_error(d, p.basis), 2);
      for (int c = 0; c < 200; ++c) {
        CHECK(best <= std::pow(projection_error(d, random_basis(8, 3, rng)), 2) + 1e-12);
      }
    }
  }

  TEST_CASE("projection error") {
    const Matrix eye = Matrix::Identity(3, 2);
    CHECK(projection_error(eye, PodBasis(Matrix{{1.0}, {0.0}, {0.0}})) == doctest::Approx(1.0));
    const Matrix in_span{{1.0, 2.0}, {3.0, -1.0}, {0.0, 0.0}};
    CHECK(projection_error(in_span, PodBasis(Matrix::Identity(3, 2))) < 1e-15);
  }

  TEST_CASE("squared error equals the discarded singular values") {
    Rng rng(12);
    const Matrix d = random_matrix(20, 9, rng);
    const PodResult p = compute_pod(d, 4);
    const double tail = p.singular_values.tail(5).squaredNorm();
    CHECK(std::pow(projection_error(d, p.basis), 2) == doctest::Approx(tail).epsilon(1e-12));
  }

  TEST_CASE("rank for energy") {
    const Vector s{{3.0, 2.0, 1.0}};
    CHECK(rank_for_energy(s, 9.0 / 14.0) == 1);
    CHECK(rank_for_energy(s, 0.9) == 2);
    CHECK(rank_for_energy(s, 1.0) == 3);
    CHECK_THROWS_AS(rank_for_energy(s, 0.0), InvalidArgument);
  }

  TEST_CASE("centering removes the temporal mean") {
    Rng rng(13);
    const Matrix c = center_snapshots(random_matrix(5, 7, rng));
    CHECK(c.rowwise().mean().norm() < 1e-15);
  }

  TEST_CASE("bad input") {
    CHECK_THROWS_AS(compute_pod(Matrix::Identity(3, 3), 0), InvalidArgument);
    CHECK_THROWS_AS(compute_pod(Matrix::Identity(3, 2), 3), InvalidArgument);
    Matrix d = Matrix::Identity(3, 2);
    d(0, 1) = std::nan("");
    CHECK_THROWS_AS(compute_pod(d, 1), NonFiniteError);
    SnapshotMatrix empty;
    CHECK_THROWS_AS(empty.validate(), DimensionError);
  }
}
