#include "grasspod/error.hpp"
#include "grasspod/harness.hpp"
#include "grasspod/pdelab.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace grasspod;
using namespace testing;

namespace {

std::vector<CaseData> small_burgers(Index rank) {
  std::vector<SnapshotMatrix> runs;
  for (double a : {1.0, 1.3, 1.6, 1.9}) {
    for (double nu : {0.005, 0.008}) {
      BurgersSpec s;
      s.a = a;
      s.nu = nu;
      s.nx = 64;
      s.nt = 21;
      runs.push_back(run_burgers(s));
    }
  }
  return prepare_cases(std::move(runs), rank);
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("mod-3 split") {
    const SplitIndices six = split_mod3(6);
    CHECK(six.train == std::vector<std::size_t>{0, 3});
    CHECK(six.test == std::vector<std::size_t>{1, 2, 4, 5});
    const SplitIndices one = split_mod3(1);
    CHECK(one.train == std::vector<std::size_t>{0});
    CHECK(one.test.empty());
    const SplitIndices many = split_mod3(42);
    CHECK(many.train.size() == 14);
    CHECK(many.test.size() == 28);
  }

  TEST_CASE("k-fold partitions") {
    const auto loo = kfold(5, 5, 0);
    for (const auto& f : loo) CHECK(f.test.size() == 1);
    for (const auto& f : kfold(10, 5, 3)) CHECK(f.test.size() == 2);
    Rng rng(61);
    for (int trial = 0; trial < 30; ++trial) {
      const std::size_t n = 6 + static_cast<std::size_t>(rng.below(45));
      const int k = 2 + static_cast<int>(rng.below(5));
      const auto folds = kfold(n, k, rng.below(1000));
      std::vector<int> seen(n, 0);
      for (const auto& f : folds) {
        CHECK(f.train.size() + f.test.size() == n);
        CHECK(f.test.size() >= n / static_cast<std::size_t>(k));
        CHECK(f.test.size() <= n / static_cast<std::size_t>(k) + 1);
        for (std::size_t i : f.test) ++seen[i];
      }
      CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
    }
    CHECK(kfold(12, 4, 7)[0].test == kfold(12, 4, 7)[0].test);
    CHECK_THROWS_AS(kfold(3, 4, 0), InvalidArgument);
    CHECK_THROWS_AS(kfold(3, 1, 0), InvalidArgument);
  }

  TEST_CASE("relative error") {
    const Matrix d{{1.0, 2.0}, {0.0, -1.0}, {0.0, 0.0}};
    CHECK(relative_error(d, PodBasis(Matrix::Identity(3, 2))) < 1e-15);
    const Matrix rank1{{1.0}, {0.0}, {0.0}};
    CHECK(relative_error(rank1, PodBasis(Matrix{{0.0}, {1.0}, {0.0}})) == doctest::Approx(1.0));
    Rng rng(62);
    for (int trial = 0; trial < 10; ++trial) {
      const Matrix m = random_matrix(9, 6, rng);
      const PodBasis b = random_basis(9, 3, rng);
      const double pyth = std::sqrt(1.0 - (b.matrix().transpose() * m).squaredNorm() / m.squaredNorm());
      CHECK(relative_error(m, b) == doctest::Approx(pyth).epsilon(1e-12));
    }
    CHECK_THROWS_AS(relative_error(Matrix::Zero(3, 2), PodBasis(Matrix::Identity(3, 1))), InvalidArgument);
  }

  TEST_CASE("error statistics") {
    const ErrorStats s = ErrorStats::from({4.0, 1.0, 3.0, 2.0});
    CHECK(s.count == 4);
    CHECK(s.mean == doctest::Approx(2.5));
    CHECK(s.std == doctest::Approx(std::sqrt(5.0 / 3.0)));
    CHECK(s.median == doctest::Approx(2.5));
    CHECK(s.q25 == doctest::Approx(1.75));
    CHECK(s.q75 == doctest::Approx(3.25));
    CHECK(s.min == 1.0);
    CHECK(s.max == 4.0);
    const ErrorStats one = ErrorStats::from({0.3});
    CHECK(one.mean == 0.3);
    CHECK(one.median == 0.3);
    CHECK(one.min == 0.3);
    CHECK(one.max == 0.3);
    CHECK(one.std == 0.0);
    CHECK(ErrorStats::from({}).count == 0);
  }

  TEST_CASE("oracle errors equal the truncation floors") {
    const auto cases = small_burgers(3);
    std::vector<std::size_t> all(cases.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    for (const CaseResult& r : evaluate(Method::oracle, nullptr, cases, all)) {
      CHECK_FALSE(r.failed);
      CHECK(r.error == doctest::Approx(r.floor).epsilon(1e-10));
    }
  }

  TEST_CASE("fit to one case reaches its floor") {
    const auto cases = small_burgers(3);
    SurrogateConfig cfg;
    cfg.train.rounds = 150;
    cfg.train.learning_rate = 0.3;
    const Surrogate s = train_surrogate(cases, {2}, cfg);
    const auto res = evaluate(Method::cxgb, &s, cases, {2});
    CHECK(std::abs(res[0].error - res[0].floor) < 1e-3);
    const auto interp = evaluate(Method::interp, &s, cases, {2});
    CHECK(interp[0].error == doctest::Approx(interp[0].floor).epsilon(1e-8));

    // Off-center: the chart sits at another case, so case 2 embeds away from 0.
    cfg.policy = ReferencePolicy::index;
    cfg.reference_index = 0;
    const Surrogate off = train_surrogate(cases, {5, 2}, cfg);
    CHECK(off.y.col(1).norm() > 0.01);
    const auto res2 = evaluate(Method::cxgb, &off, cases, {2});
    CHECK(std::abs(res2[0].error - res2[0].floor) < 1e-3);
  }

  TEST_CASE("split study and cross-validation") {
    const auto cases = small_burgers(3);
    SurrogateConfig cfg;
    cfg.train.rounds = 30;
    const std::vector<Method> methods{Method::cxgb, Method::interp, Method::oracle};
    const StudyResult split = run_split(cases, split_mod3(cases.size()), methods, cfg);
    CHECK(split.cases.size() == 3 * split_mod3(cases.size()).test.size());
    const StudyResult cv = run_cv(cases, 4, 0, methods, cfg);
    CHECK(cv.folds.size() == 4);
    CHECK(summarize(cv.cases, Method::cxgb).count == cases.size());
    const StudyResult loo = run_cv(cases, static_cast<int>(cases.size()), 0, {Method::oracle}, cfg);
    CHECK(loo.cases.size() == cases.size());
    for (const CaseResult& r : cv.cases) CHECK_FALSE(r.failed);
    // Same seed, same results.
    const StudyResult again = run_cv(cases, 4, 0, methods, cfg);
    for (std::size_t i = 0; i < cv.cases.size(); ++i) CHECK(cv.cases[i].error == again.cases[i].error);
  }

  TEST_CASE("method names") {
    CHECK(parse_method("truth") == Method::oracle);
    CHECK(to_string(parse_method("cxgb")) == "cxgb");
    CHECK_THROWS_AS(parse_method("gp"), InvalidArgument);
  }
}
