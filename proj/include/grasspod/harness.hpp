#pragma once

#include "grasspod/baseline.hpp"
#include "grasspod/chart.hpp"
#include "grasspod/cxgboost.hpp"
#include "grasspod/pod.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace grasspod {

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Train = {i : i mod 3 == 0} over 0-based positions of the sorted list.
SplitIndices split_mod3(std::size_t count);

/// Seeded shuffle, then k contiguous folds whose sizes differ by at most one.
/// Fold f's test set is its block; the train set is everything else. Both
/// lists are returned ascending.
std::vector<SplitIndices> kfold(std::size_t count, int k, std::uint64_t seed);

/// ||D - Phi Phi^T D||_F / ||D||_F. Throws InvalidArgument for a zero D.
double relative_error(const Matrix& d_true, const PodBasis& basis);

struct ErrorStats {
  std::size_t count = 0;
  double mean = 0, std = 0, median = 0, q25 = 0, q75 = 0, min = 0, max = 0;

  /// Sample standard deviation (n - 1 denominator, 0 for one value);
  /// quantiles by linear interpolation between order statistics.
  static ErrorStats from(std::vector<double> values);
};

enum class Method { cxgb, interp, oracle };

Method parse_method(const std::string& name);
std::string to_string(Method m);

/// One parameter setting with its snapshots and rank-r POD.
struct CaseData {
  std::string label;
  Vector theta;
  std::string split;  ///< "train" / "test" from the manifest
  Matrix snapshots;
  PodResult pod;
};

/// POD of every snapshot matrix (in parallel). Labels, parameters and splits
/// are carried over; `splits` may be empty.
std::vector<CaseData> prepare_cases(std::vector<SnapshotMatrix> snapshots, Index rank,
                                    const std::vector<std::string>& splits = {});

struct SurrogateConfig {
  TrainConfig train;
  ReferencePolicy policy = ReferencePolicy::minimax;
  std::size_t reference_index = 0;
  InterpScheme scheme = InterpScheme::automatic;
  /// Leave training bases that no chart can hold out of the fit (listed in
  /// Surrogate::reference.excluded) instead of failing.
  bool drop_out_of_chart = false;
};

/// Everything learned from one training set: a shared chart, the embedded
/// training data, the boosted ensemble and the interpolation baseline.
struct Surrogate {
  Chart chart;
  ReferenceChoice reference;  ///< indices refer to the training list
  Matrix theta;               ///< N x d parameters of the kept training bases
  Matrix y;                   ///< dim x N embedded kept training bases
  Ensemble model;
  FitTrace trace;
  std::optional<InterpModel> interp;
};

/// Builds the chart from the training bases, embeds them and fits both
/// regressors. `fit_cxgb` / `fit_interp` skip either model.
Surrogate train_surrogate(const std::vector<PodBasis>& bases, const Matrix& theta,
                          const SurrogateConfig& cfg, const std::vector<std::string>& labels = {},
                          bool fit_cxgb = true, bool fit_interp = true);

Surrogate train_surrogate(const std::vector<CaseData>& cases,
                          const std::vector<std::size_t>& train_idx, const SurrogateConfig& cfg,
                          bool fit_cxgb = true, bool fit_interp = true);

struct Prediction {
  PodBasis basis;
  Vector y;
  bool clipped = false;
};

/// Predicted basis at theta; outputs outside the ball are pulled radially to
/// radius - 1e-9 first.
Prediction predict_basis(const Surrogate& s, Method method, const Eigen::Ref<const Vector>& theta);

struct CaseResult {
  int fold = 0;
  std::string label;
  Vector theta;
  Method method = Method::cxgb;
  double error = 0.0;
  double floor = 0.0;  ///< the case's own POD truncation floor
  bool clipped = false;
  bool failed = false;
  std::string message;
};

/// Predicts a basis for every case in `test_idx` and scores it against that
/// case's snapshots. Errors thrown by a single case are recorded, not raised.
/// The oracle needs no surrogate.
std::vector<CaseResult> evaluate(Method method, const Surrogate* s,
                                 const std::vector<CaseData>& cases,
                                 const std::vector<std::size_t>& test_idx, int fold = 0);

/// Statistics over the successful results of one method.
ErrorStats summarize(const std::vector<CaseResult>& results, Method method);

struct FoldSummary {
  int fold = 0;
  std::size_t train_count = 0;
  std::size_t test_count = 0;
  std::size_t reference = 0;  ///< index into the full case list
  double max_distance = 0.0;
  int solver_failures = 0;
  std::vector<std::size_t> excluded;  ///< training cases left out of the chart
};

struct StudyResult {
  std::vector<CaseResult> cases;
  std::vector<FoldSummary> folds;
};

/// Deterministic split study: train on the given indices, score the rest.
StudyResult run_split(const std::vector<CaseData>& cases, const SplitIndices& split,
                      const std::vector<Method>& methods, const SurrogateConfig& cfg);

/// k-fold cross-validation; folds run in parallel, results are in fold order.
StudyResult run_cv(const std::vector<CaseData>& cases, int k, std::uint64_t seed,
                   const std::vector<Method>& methods, const SurrogateConfig& cfg);

}  // namespace grasspod
