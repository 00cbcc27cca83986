#include "grasspod/baseline.hpp"
#include "grasspod/chart.hpp"
#include "grasspod/error.hpp"
#include "helpers.hpp"

#include <doctest.h>

using namespace grasspod;
using namespace testing;

TEST_SUITE("baseline") {
  TEST_CASE("linear midpoint") {
    const InterpModel m(Matrix{{0.0}, {1.0}}, Matrix{{0.0, 0.4}});
    CHECK(m.scheme() == InterpScheme::linear1d);
    CHECK(m.predict(Vector{{0.5}}).y(0) == doctest::Approx(0.2));
    CHECK(m.predict(Vector{{0.25}}).y(0) == doctest::Approx(0.1));
  }

  TEST_CASE("nodes are reproduced exactly") {
    Rng rng(51);
    const Matrix y = random_matrix(6, 5, rng) * 0.2;
    const Matrix nodes{{0.3}, {-1.0}, {2.0}, {0.9}, {0.0}};
    const Matrix theta2 = random_matrix(5, 2, rng);
    const InterpModel lin(nodes, y);
    const InterpModel idw(theta2, y);
    CHECK(idw.scheme() == InterpScheme::idw);
    for (Index i = 0; i < 5; ++i) {
      CHECK(lin.predict(nodes.row(i).transpose()).y == y.col(i));
      CHECK(idw.predict(theta2.row(i).transpose()).y == y.col(i));
    }
  }

  TEST_CASE("idw exact hit and symmetric average") {
    const Matrix theta{{0.0, 0.0}, {2.0, 0.0}};
    const Matrix y{{0.2, 0.6}};
    const InterpModel m(theta, y);
    CHECK(m.predict(Vector{{0.0, 0.0}}).y(0) == 0.2);
    CHECK(m.predict(Vector{{1.0, 5.0}}).y(0) == doctest::Approx(0.4));
    // Weight 1/d^2: at (0.5, 0) the weights are 4 and 4/9.
    CHECK(m.predict(Vector{{0.5, 0.0}}).y(0) == doctest::Approx((4 * 0.2 + 4.0 / 9 * 0.6) / (4 + 4.0 / 9)));
  }

  TEST_CASE("constant extrapolation") {
    const InterpModel m(Matrix{{0.0}, {1.0}}, Matrix{{0.1, 0.3}});
    const InterpPrediction lo = m.predict(Vector{{-2.0}});
    CHECK(lo.y(0) == 0.1);
    CHECK(lo.extrapolated);
    CHECK(m.predict(Vector{{4.0}}).y(0) == 0.3);
    CHECK_FALSE(m.predict(Vector{{0.5}}).extrapolated);
  }

  TEST_CASE("wrapping back a node recovers the training subspace") {
    Rng rng(52);
    const PodBasis ref = random_basis(10, 2, rng);
    const Chart c(ref);
    std::vector<PodBasis> bases;
    Matrix y(c.dim(), 3);
    for (Index i = 0; i < 3; ++i) {
      bases.push_back(exp_map(ref, HorizontalLift{random_lift(ref, 0.3 + 0.3 * i, rng)}));
      y.col(i) = embed(c, bases.back());
    }
    const InterpModel m(Matrix{{1.0}, {2.0}, {3.0}}, y);
    for (Index i = 0; i < 3; ++i) {
      CHECK(geodesic_distance(wrap_back(c, m.predict(Vector{{1.0 + i}}).y), bases[static_cast<std::size_t>(i)]) <
            1e-8);
    }
  }

  TEST_CASE("predictions stay in the ball") {
    Rng rng(53);
    Matrix y = random_matrix(8, 6, rng);
    for (Index i = 0; i < 6; ++i) y.col(i) *= (kHalfPi - 1e-6) / y.col(i).norm();
    const InterpModel m(random_matrix(6, 3, rng), y);
    for (int k = 0; k < 100; ++k) CHECK(m.predict(random_vector(3, rng) * 2.0).y.norm() < kHalfPi);
  }

  TEST_CASE("validation") {
    CHECK_THROWS_AS(InterpModel(Matrix{{0.0}, {0.0}}, Matrix{{0.1, 0.2}}), InvalidArgument);
    CHECK_THROWS_AS(InterpModel(Matrix{{0.0}}, Matrix{{0.1}}, InterpScheme::linear1d), InvalidArgument);
    CHECK_THROWS_AS(InterpModel(Matrix{{0.0, 1.0}, {1.0, 0.0}}, Matrix{{0.1, 0.2}}, InterpScheme::linear1d),
                    InvalidArgument);
    CHECK_THROWS_AS(InterpModel(Matrix{{0.0}, {1.0}}, Matrix{{0.1, 2.0}}), InvalidArgument);
    CHECK_THROWS_AS(InterpModel(Matrix{{0.0}, {1.0}}, Matrix{{0.1, 0.2, 0.3}}), DimensionError);
    const InterpModel m(Matrix{{0.0}, {1.0}}, Matrix{{0.1, 0.2}});
    CHECK_THROWS_AS(m.predict(Vector{{0.0, 1.0}}), DimensionError);
    CHECK(parse_interp_scheme("idw") == InterpScheme::idw);
    CHECK_THROWS_AS(parse_interp_scheme("cubic"), InvalidArgument);
  }
}
