#include "grasspod/cxgboost.hpp"
#include "grasspod/error.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace grasspod;
using namespace testing;

namespace {

double loss(const Vector& y, const Vector& yhat) { return 0.5 * (y - yhat).squaredNorm(); }

GrowState make_state(const Matrix& theta, const Matrix& grad, const Matrix& pred) {
  GrowState s;
  s.theta = &theta;
  s.grad = &grad;
  s.predictions = &pred;
  s.all_rows.resize(static_cast<std::size_t>(theta.rows()));
  std::iota(s.all_rows.begin(), s.all_rows.end(), 0);
  s.grad_rows = s.all_rows;
  return s;
}

}  // namespace

TEST_SUITE("cxgboost") {
  TEST_CASE("gradient of the squared loss") {
    const Vector y{{0.3, -0.2}};
    CHECK(gradients(y, y).g.norm() == 0.0);
    const GradientPair gp = gradients(Vector{{1.0, 0.0}}, Vector{{0.0, 0.0}});
    CHECK(gp.g == Vector{{-1.0, 0.0}});
    CHECK(gp.h_scale == 1.0);
  }

  TEST_CASE("gradient matches central differences") {
    Rng rng(41);
    const double eps = 1e-5;
    for (int trial = 0; trial < 20; ++trial) {
      const Vector y = random_vector(7, rng);
      const Vector yhat = random_vector(7, rng);
      const Vector g = gradients(y, yhat).g;
      for (Index i = 0; i < 7; ++i) {
        Vector up = yhat, down = yhat;
        up(i) += eps;
        down(i) -= eps;
        CHECK(std::abs(g(i) - (loss(y, up) - loss(y, down)) / (2 * eps)) < 1e-6);
      }
    }
  }

  TEST_CASE("a single sample grows a single leaf") {
    const Matrix theta{{0.5}};
    const Matrix grad{{-0.4}, {0.1}};
    const Matrix pred = Matrix::Zero(2, 1);
    TrainConfig cfg;
    cfg.max_depth = 3;
    const Tree t = grow_tree(make_state(theta, grad, pred), cfg);
    REQUIRE(t.nodes.size() == 1);
    LeafProblem p{grad.col(0), 1.0, pred, cfg.l2_penalty};
    CHECK((t.nodes[0].weight - solve_leaf_qcqp(p, kHalfPi)).norm() == 0.0);
  }

  TEST_CASE("opposite residuals split into two leaves") {
    const Matrix theta{{0.0}, {1.0}};
    const Matrix targets{{0.5, -0.5}};
    const Matrix pred = Matrix::Zero(1, 2);
    const Matrix grad = pred - targets;
    TrainConfig cfg;
    cfg.max_depth = 1;
    cfg.leaf_penalty = 0.0;
    cfg.l2_penalty = 0.0;
    const Tree t = grow_tree(make_state(theta, grad, pred), cfg);
    REQUIRE(t.nodes.size() == 3);
    CHECK(t.nodes[0].feature == 0);
    CHECK(t.nodes[0].threshold == doctest::Approx(0.5));
    CHECK(t.leaf_weight(Vector{{0.0}})(0) == doctest::Approx(0.5));
    CHECK(t.leaf_weight(Vector{{1.0}})(0) == doctest::Approx(-0.5));
  }

  TEST_CASE("constant residuals do not split") {
    const Matrix theta{{0.0}, {1.0}, {2.0}};
    const Matrix pred = Matrix::Zero(2, 3);
    const Matrix grad = Matrix::Constant(2, 3, -0.2);
    TrainConfig cfg;
    cfg.max_depth = 4;
    CHECK(grow_tree(make_state(theta, grad, pred), cfg).nodes.size() == 1);
  }

  TEST_CASE("a single sample is fit by a contraction") {
    const Matrix theta{{0.3, 0.7}};
    const Matrix y{{0.4}, {-0.9}, {0.2}};
    TrainConfig cfg;
    cfg.rounds = 200;
    cfg.learning_rate = 0.2;
    const Ensemble m = fit(EmbeddedDataset{theta, y}, cfg);
    CHECK((m.predict(theta.row(0).transpose()) - y.col(0)).norm() < 1e-4);
    CHECK((m.predict(Vector{{5.0, -3.0}}) - y.col(0)).norm() < 1e-4);
  }

  TEST_CASE("empty ensemble predicts zero") {
    const Matrix theta{{0.0}, {1.0}};
    const Matrix y{{0.1, 0.2}};
    TrainConfig cfg;
    cfg.rounds = 0;
    const Ensemble m = fit(EmbeddedDataset{theta, y}, cfg);
    CHECK(m.trees.empty());
    CHECK(m.predict(Vector{{0.5}}).norm() == 0.0);
  }

  TEST_CASE("two clusters are representable by stumps") {
    Rng rng(42);
    const Index n = 20;
    Matrix theta(n, 1);
    Matrix y(3, n);
    const Vector a{{0.3, -0.2, 0.1}}, b{{-0.4, 0.5, 0.2}};
    for (Index i = 0; i < n; ++i) {
      theta(i, 0) = uniform(rng, -1.0, 1.0);
      y.col(i) = theta(i, 0) < 0.0 ? a : b;
    }
    TrainConfig cfg;
    cfg.rounds = 50;
    cfg.max_depth = 1;
    cfg.learning_rate = 1.0;
    cfg.l2_penalty = 0.0;
    cfg.leaf_penalty = 0.0;
    const Ensemble m = fit(EmbeddedDataset{theta, y}, cfg);
    Matrix pred(3, n);
    for (Index i = 0; i < n; ++i) pred.col(i) = m.predict(theta.row(i).transpose());
    CHECK((pred - y).norm() / y.norm() < 1e-6);
  }

  TEST_CASE("stump traversal") {
    Ensemble m;
    m.learning_rate = 0.5;
    m.output_dim = 1;
    m.input_dim = 1;
    Tree t;
    t.nodes.resize(3);
    t.nodes[0].feature = 0;
    t.nodes[0].threshold = 0.0;
    t.nodes[0].left = 1;
    t.nodes[0].right = 2;
    t.nodes[1].weight = Vector{{0.25}};
    t.nodes[2].weight = Vector{{-1.0}};
    m.trees.push_back(t);
    CHECK(m.predict(Vector{{-1.0}})(0) == 0.5 * 0.25);
    CHECK(m.predict(Vector{{1.0}})(0) == -0.5);
    CHECK(t.depth() == 1);
    CHECK(t.leaf_count() == 2);
    CHECK_THROWS_AS(m.predict(Vector{{1.0, 2.0}}), DimensionError);
  }

  TEST_CASE("training predictions stay in the ball") {
    Rng rng(43);
    for (int trial = 0; trial < 5; ++trial) {
      const Index n = 25;
      Matrix theta = random_matrix(n, 2, rng);
      Matrix y = random_matrix(40, n, rng);
      for (Index i = 0; i < n; ++i) y.col(i) *= uniform(rng, 1.45, 1.5706) / y.col(i).norm();
      TrainConfig cfg;
      cfg.rounds = 60;
      cfg.learning_rate = 1.0;
      cfg.max_depth = 3;
      cfg.subsample = 0.7;
      cfg.rng_seed = static_cast<std::uint64_t>(trial);
      FitTrace trace;
      const Ensemble m = fit(EmbeddedDataset{theta, y}, cfg, &trace);
      for (Index i = 0; i < n; ++i) CHECK(m.predict(theta.row(i).transpose()).norm() <= kHalfPi + 1e-9);
      CHECK(trace.train_loss.size() == 61);
      CHECK(trace.train_loss.back() < trace.train_loss.front());
    }
  }

  TEST_CASE("same seed, same model; different seed, different model") {
    Rng rng(44);
    const Matrix theta = random_matrix(15, 2, rng);
    const Matrix y = random_matrix(5, 15, rng) * 0.2;
    TrainConfig cfg;
    cfg.rounds = 20;
    cfg.subsample = 0.6;
    const Vector q{{0.1, -0.3}};
    const Vector a = fit(EmbeddedDataset{theta, y}, cfg).predict(q);
    CHECK(fit(EmbeddedDataset{theta, y}, cfg).predict(q) == a);
    cfg.rng_seed = 99;
    CHECK(fit(EmbeddedDataset{theta, y}, cfg).predict(q) != a);
  }

  TEST_CASE("config and data validation") {
    TrainConfig cfg;
    cfg.learning_rate = 0.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
    cfg = TrainConfig{};
    cfg.subsample = 1.5;
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
    const Matrix theta{{0.0}, {1.0}};
    CHECK_THROWS(fit(EmbeddedDataset{theta, Matrix::Constant(1, 2, 2.0)}, TrainConfig{}));
    CHECK_THROWS(fit(EmbeddedDataset{theta, Matrix::Zero(1, 3)}, TrainConfig{}));
  }
}
