#pragma once

#include "grasspod/grassmann.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace grasspod {

struct TrainConfig {
  int rounds = 100;             ///< K
  double learning_rate = 0.3;   ///< eta in (0, 1]
  int max_depth = 3;            ///< D
  double leaf_penalty = 1e-3;   ///< gamma, charged per leaf
  double l2_penalty = 1e-2;     ///< lambda
  double subsample = 1.0;       ///< row fraction per round, (0, 1]
  int min_samples_leaf = 1;
  std::uint64_t rng_seed = 0;
  double radius = kHalfPi;
  /// Testing switch: when false leaves take the closed-form unconstrained
  /// weight -G / (|I| + lambda) and the ball constraint is ignored.
  bool constrained = true;

  void validate() const;
};

/// Training pairs. Row i of `theta` goes with column i of `y`.
struct EmbeddedDataset {
  Matrix theta;  ///< N x d
  Matrix y;      ///< (nr - r) x N

  Index size() const { return theta.rows(); }
  void validate(double radius) const;
};

struct GradientPair {
  Vector g;
  double h_scale = 1.0;  ///< Hessian is h_scale * I
};

/// Gradient and Hessian scale of l = 1/2 ||y - y_hat||^2 at y_hat.
GradientPair gradients(const Vector& y_true, const Vector& y_pred);

/// min G^T w + 1/2 (h_scale + lambda) ||w||^2  s.t.  ||w + c_i|| <= radius.
struct LeafProblem {
  Vector g_sum;        ///< G
  double h_scale = 0;  ///< sum of per-sample Hessian scales
  Matrix centers;      ///< one prior prediction per column
  double lambda = 0;
};

/// Leaf objective G^T w + 1/2 (h_scale + lambda) ||w||^2 (no gamma).
double leaf_objective(const LeafProblem& p, const Vector& w);

/// Optimal constrained leaf weight. Returns the unconstrained minimizer
/// verbatim whenever it is feasible. Throws SolverFailure when the iterative
/// path does not converge.
Vector solve_leaf_qcqp(const LeafProblem& p, double radius);

/// Flat binary tree; node 0 is the root.
struct TreeNode {
  int feature = -1;  ///< -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  Vector weight;  ///< leaf weight (empty for split nodes)

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;

  const Vector& leaf_weight(const Eigen::Ref<const Vector>& theta) const;
  int depth() const;
  int leaf_count() const;
};

/// Inputs of one tree fit, all in the coordinates used for boosting.
struct GrowState {
  const Matrix* theta = nullptr;        ///< N x d
  const Matrix* grad = nullptr;         ///< p x N per-sample gradients
  const Matrix* predictions = nullptr;  ///< p x N current y_hat (constraint centers)
  std::vector<int> grad_rows;           ///< rows that contribute G and H
  std::vector<int> all_rows;            ///< rows whose constraints apply
};

struct GrowStats {
  int qcqp_solves = 0;
  int solver_failures = 0;
};

/// Greedy exact-split growth with QCQP leaves (one boosting round).
Tree grow_tree(const GrowState& state, const TrainConfig& cfg, GrowStats* stats = nullptr);

/// Additive tree ensemble. Leaf weights live in the coordinates of `basis`
/// (an orthonormal output_dim x p matrix); an empty basis means identity.
struct Ensemble {
  std::vector<Tree> trees;
  double learning_rate = 0.3;
  Index output_dim = 0;
  Index input_dim = 0;
  Matrix basis;

  /// Sum of eta-scaled leaf weights in boosting coordinates.
  Vector predict_coordinates(const Eigen::Ref<const Vector>& theta) const;
  Vector predict(const Eigen::Ref<const Vector>& theta) const;
};

struct FitTrace {
  std::vector<double> train_loss;         ///< after each round, index 0 = initial
  std::vector<double> max_pred_norm;      ///< after each round
  int solver_failures = 0;
};

/// Algorithm: K rounds of gradient boosting with constrained leaves.
Ensemble fit(const EmbeddedDataset& data, const TrainConfig& cfg, FitTrace* trace = nullptr);

/// Same as Ensemble::predict.
Vector predict(const Ensemble& model, const Eigen::Ref<const Vector>& theta);

}  // namespace grasspod
