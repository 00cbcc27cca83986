#include "grasspod/error.hpp"
#include "grasspod/grassmann.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace grasspod;
using namespace testing;

TEST_SUITE("grassmann") {
  TEST_CASE("zero lift returns the base subspace") {
    Rng rng(1);
    const PodBasis base = random_basis(12, 3, rng);
    const PodBasis out = exp_map(base, HorizontalLift{Matrix::Zero(12, 3)});
    CHECK(geodesic_distance(base, out) < 1e-12);
  }

  TEST_CASE("exp on G(1,2) is a rotation") {
    const PodBasis base(Matrix{{1.0}, {0.0}});
    const PodBasis out = exp_map(base, HorizontalLift{Matrix{{0.0}, {0.3}}});
    CHECK(out.matrix()(0, 0) == doctest::Approx(std::cos(0.3)).epsilon(1e-14));
    CHECK(out.matrix()(1, 0) == doctest::Approx(std::sin(0.3)).epsilon(1e-14));
  }

  TEST_CASE("log on G(1,2) inverts the rotation") {
    const PodBasis base(Matrix{{1.0}, {0.0}});
    const PodBasis target(Matrix{{std::cos(0.3)}, {std::sin(0.3)}});
    const HorizontalLift z = log_map(base, target);
    CHECK(std::abs(z.z(0, 0)) < 1e-14);
    CHECK(z.z(1, 0) == doctest::Approx(0.3).epsilon(1e-13));
  }

  TEST_CASE("log of the base point is zero") {
    Rng rng(2);
    const PodBasis base = random_basis(20, 4, rng);
    CHECK(log_map(base, base).z.norm() < 1e-12);
  }

  TEST_CASE("log inverts exp for random lifts of norm 0.5") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
      const Index n = 6 + static_cast<Index>(rng.below(40));
      const Index r = 1 + static_cast<Index>(rng.below(5));
      const PodBasis base = random_basis(n, r, rng);
      const Matrix z = random_lift(base, 0.5, rng);
      const HorizontalLift back = log_map(base, exp_map(base, HorizontalLift{z}));
      CHECK((back.z - z).norm() < 1e-8);
    }
  }

  TEST_CASE("lift norm equals geodesic distance") {
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
      const PodBasis a = random_basis(15, 3, rng);
      const PodBasis b = exp_map(a, HorizontalLift{random_lift(a, uniform(rng, 0.1, 1.4), rng)});
      CHECK(std::abs(log_map(a, b).tangent_norm() - geodesic_distance(a, b)) < 1e-8);
    }
  }

  TEST_CASE("distance ignores the choice of representative") {
    Rng rng(5);
    const PodBasis a = random_basis(10, 3, rng);
    const Matrix j = Eigen::HouseholderQR<Matrix>(random_matrix(3, 3, rng)).householderQ();
    Matrix rotated = a.matrix() * j;
    CHECK(geodesic_distance(a, PodBasis(rotated)) < 1e-7);
    CHECK(geodesic_distance(a, a) < 1e-7);
  }

  TEST_CASE("principal angles match constructed angles") {
    Rng rng(6);
    const PodBasis base = random_basis(30, 4, rng);
    const Vector want{{0.05, 0.4, 0.9, 1.45}};
    const Vector got = principal_angles(base, basis_at_angles(base, want, rng));
    REQUIRE(got.size() == 4);
    for (Index k = 0; k < 4; ++k) CHECK(std::abs(got(k) - want(k)) < 1e-12);
    CHECK(geodesic_distance(base, basis_at_angles(base, want, rng)) ==
          doctest::Approx(want.norm()).epsilon(1e-12));
  }

  TEST_CASE("analytic angles on G(1,2)") {
    const PodBasis e1(Matrix{{1.0}, {0.0}});
    const PodBasis e2(Matrix{{0.0}, {1.0}});
    const PodBasis rot(Matrix{{std::cos(0.3)}, {std::sin(0.3)}});
    CHECK(principal_angles(e1, e2)(0) == doctest::Approx(kHalfPi));
    CHECK(principal_angles(e1, rot)(0) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(geodesic_distance(e1, rot) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(principal_angles(e1, e1)(0) == 0.0);
  }

  TEST_CASE("orthogonal subspaces sit on the cut locus") {
    const PodBasis e1(Matrix{{1.0}, {0.0}});
    const PodBasis e2(Matrix{{0.0}, {1.0}});
    CHECK_THROWS_AS(log_map(e1, e2), CutLocusError);
  }

  TEST_CASE("input validation") {
    CHECK_THROWS_AS(PodBasis(Matrix{{1.0}, {1.0}}), InvalidArgument);
    CHECK_THROWS_AS(PodBasis(Matrix{{std::nan("")}, {1.0}}), NonFiniteError);
    CHECK_THROWS_AS(PodBasis(Matrix::Identity(2, 3)), DimensionError);
    Rng rng(7);
    const PodBasis a = random_basis(5, 2, rng);
    const PodBasis b = random_basis(6, 2, rng);
    CHECK_THROWS_AS(geodesic_distance(a, b), DimensionError);
    CHECK_THROWS_AS(exp_map(a, HorizontalLift{Matrix::Zero(5, 3)}), DimensionError);
  }
}
