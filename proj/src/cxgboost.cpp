#include "grasspod/cxgboost.hpp"

#include "grasspod/error.hpp"
#include "grasspod/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace grasspod {

void TrainConfig::validate() const {
  if (rounds < 0) throw InvalidArgument("rounds must be >= 0");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw InvalidArgument("learning_rate must lie in (0, 1]");
  }
  if (max_depth < 0) throw InvalidArgument("max_depth must be >= 0");
  if (!(leaf_penalty >= 0.0)) throw InvalidArgument("leaf_penalty must be >= 0");
  if (!(l2_penalty >= 0.0)) throw InvalidArgument("l2_penalty must be >= 0");
  if (!(subsample > 0.0 && subsample <= 1.0)) throw InvalidArgument("subsample must lie in (0, 1]");
  if (min_samples_leaf < 1) throw InvalidArgument("min_samples_leaf must be >= 1");
  if (!(radius > 0.0)) throw InvalidArgument("radius must be positive");
}

void EmbeddedDataset::validate(double radius) const {
  if (theta.rows() < 1) throw InvalidArgument("dataset is empty");
  if (theta.cols() < 1) throw InvalidArgument("parameter dimension must be >= 1");
  if (y.cols() != theta.rows()) throw DimensionError("theta and y disagree on the sample count");
  if (y.rows() < 1) throw DimensionError("targets must have positive dimension");
  if (!theta.allFinite() || !y.allFinite()) throw NonFiniteError("dataset has non-finite values");
  for (Index i = 0; i < y.cols(); ++i) {
    const double nrm = y.col(i).norm();
    if (!(nrm < radius)) {
      throw InvalidArgument("target " + std::to_string(i) + " has norm " + std::to_string(nrm) +
                            " outside the open ball of radius " + std::to_string(radius));
    }
  }
}

GradientPair gradients(const Vector& y_true, const Vector& y_pred) {
  if (y_true.size() != y_pred.size()) throw DimensionError("gradients: length mismatch");
  return {y_pred - y_true, 1.0};
}

const Vector& Tree::leaf_weight(const Eigen::Ref<const Vector>& theta) const {
  int idx = 0;
  while (!nodes[static_cast<std::size_t>(idx)].is_leaf()) {
    const TreeNode& nd = nodes[static_cast<std::size_t>(idx)];
    idx = theta(nd.feature) < nd.threshold ? nd.left : nd.right;
  }
  return nodes[static_cast<std::size_t>(idx)].weight;
}

int Tree::depth() const {
  std::vector<int> level(nodes.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (!nodes[i].is_leaf()) {
      level[static_cast<std::size_t>(nodes[i].left)] = level[i] + 1;
      level[static_cast<std::size_t>(nodes[i].right)] = level[i] + 1;
    }
  }
  return deepest;
}

int Tree::leaf_count() const {
  return static_cast<int>(std::count_if(nodes.begin(), nodes.end(),
                                        [](const TreeNode& n) { return n.is_leaf(); }));
}

namespace {

struct LeafFit {
  Vector weight;
  double objective = 0.0;
};

class TreeGrower {
 public:
  TreeGrower(const GrowState& s, const TrainConfig& cfg, GrowStats* stats)
      : s_(s), cfg_(cfg), stats_(stats), in_grad_(static_cast<std::size_t>(s.theta->rows()), 0) {
    for (int i : s.grad_rows) in_grad_[static_cast<std::size_t>(i)] = 1;
  }

  Tree grow() {
    std::vector<int> rows = s_.all_rows;
    build(rows, 0);
    return std::move(tree_);
  }

 private:
  LeafFit fit_leaf(const Vector& g_sum, int count, const std::vector<int>& rows) {
    LeafProblem prob;
    prob.g_sum = g_sum;
    prob.h_scale = static_cast<double>(count);
    prob.lambda = cfg_.l2_penalty;
    LeafFit out;
    if (!cfg_.constrained) {
      out.weight = -g_sum / (prob.h_scale + prob.lambda);
    } else {
      prob.centers.resize(g_sum.size(), static_cast<Index>(rows.size()));
      for (std::size_t k = 0; k < rows.size(); ++k) {
        prob.centers.col(static_cast<Index>(k)) = s_.predictions->col(rows[k]);
      }
      if (stats_) ++stats_->qcqp_solves;
      try {
        out.weight = solve_leaf_qcqp(prob, cfg_.radius);
      } catch (const SolverFailure&) {
        if (stats_) ++stats_->solver_failures;
        out.weight = Vector::Zero(g_sum.size());
      }
    }
    out.objective = leaf_objective(prob, out.weight);
    return out;
  }

  Vector grad_sum(const std::vector<int>& rows, int* count) const {
    Vector g = Vector::Zero(s_.grad->rows());
    int c = 0;
    for (int i : rows) {
      if (in_grad_[static_cast<std::size_t>(i)]) {
        g += s_.grad->col(i);
        ++c;
      }
    }
    *count = c;
    return g;
  }

  int make_leaf(Vector w) {
    TreeNode leaf;
    leaf.weight = std::move(w);
    tree_.nodes.push_back(std::move(leaf));
    return static_cast<int>(tree_.nodes.size()) - 1;
  }

  int build(const std::vector<int>& rows, int depth) {
    int count = 0;
    const Vector g_parent = grad_sum(rows, &count);
    LeafFit parent = fit_leaf(g_parent, count, rows);
    if (depth >= cfg_.max_depth || count < 2 * cfg_.min_samples_leaf) {
      return make_leaf(std::move(parent.weight));
    }

    const Matrix& theta = *s_.theta;
    double best_gain = 0.0;
    int best_feature = -1;
    double best_threshold = 0.0;

    std::vector<int> order(rows);
    for (Index j = 0; j < theta.cols(); ++j) {
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return theta(a, j) < theta(b, j); });
      Vector g_left = Vector::Zero(g_parent.size());
      int n_left = 0;
      std::vector<int> left_rows;
      left_rows.reserve(order.size());
      for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        const int i = order[k];
        left_rows.push_back(i);
        if (in_grad_[static_cast<std::size_t>(i)]) {
          g_left += s_.grad->col(i);
          ++n_left;
        }
        const double lo = theta(i, j);
        const double hi = theta(order[k + 1], j);
        if (!(lo < hi)) continue;
        const int n_right = count - n_left;
        if (n_left < cfg_.min_samples_leaf || n_right < cfg_.min_samples_leaf) continue;

        const std::vector<int> right_rows(order.begin() + static_cast<std::ptrdiff_t>(k + 1),
                                          order.end());
        const LeafFit left = fit_leaf(g_left, n_left, left_rows);
        const LeafFit right = fit_leaf(g_parent - g_left, n_right, right_rows);
        const double gain =
            parent.objective - (left.objective + right.objective) - cfg_.leaf_penalty;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = static_cast<int>(j);
          double tau = lo + 0.5 * (hi - lo);
          if (!(tau > lo)) tau = hi;
          best_threshold = tau;
        }
      }
    }

    if (best_feature < 0) return make_leaf(std::move(parent.weight));

    std::vector<int> left_rows;
    std::vector<int> right_rows;
    for (int i : rows) {
      (theta(i, best_feature) < best_threshold ? left_rows : right_rows).push_back(i);
    }
    const int self = static_cast<int>(tree_.nodes.size());
    TreeNode split;
    split.feature = best_feature;
    split.threshold = best_threshold;
    tree_.nodes.push_back(std::move(split));
    const int l = build(left_rows, depth + 1);
    const int r = build(right_rows, depth + 1);
    tree_.nodes[static_cast<std::size_t>(self)].left = l;
    tree_.nodes[static_cast<std::size_t>(self)].right = r;
    return self;
  }

  const GrowState& s_;
  const TrainConfig& cfg_;
  GrowStats* stats_;
  std::vector<char> in_grad_;
  Tree tree_;
};

double half_squared_loss(const Matrix& target, const Matrix& pred) {
  return 0.5 * (target - pred).squaredNorm();
}

}  // namespace

Tree grow_tree(const GrowState& state, const TrainConfig& cfg, GrowStats* stats) {
  if (!state.theta || !state.grad || !state.predictions) {
    throw InvalidArgument("grow_tree: incomplete state");
  }
  if (state.all_rows.empty() || state.grad_rows.empty()) {
    throw InvalidArgument("grow_tree: empty sample set");
  }
  return TreeGrower(state, cfg, stats).grow();
}

Vector Ensemble::predict_coordinates(const Eigen::Ref<const Vector>& theta) const {
  if (theta.size() != input_dim) throw DimensionError("predict: wrong parameter dimension");
  if (!theta.allFinite()) throw NonFiniteError("predict: non-finite parameter");
  const Index p = basis.size() == 0 ? output_dim : basis.cols();
  Vector acc = Vector::Zero(p);
  for (const Tree& t : trees) acc += t.leaf_weight(theta);
  return learning_rate * acc;
}

Vector Ensemble::predict(const Eigen::Ref<const Vector>& theta) const {
  Vector c = predict_coordinates(theta);
  if (basis.size() == 0) return c;
  return basis * c;
}

Vector predict(const Ensemble& model, const Eigen::Ref<const Vector>& theta) {
  return model.predict(theta);
}

Ensemble fit(const EmbeddedDataset& data, const TrainConfig& cfg, FitTrace* trace) {
  cfg.validate();
  data.validate(cfg.radius);

  const Index n_samples = data.size();
  const Index out_dim = data.y.rows();

  Ensemble model;
  model.learning_rate = cfg.learning_rate;
  model.output_dim = out_dim;
  model.input_dim = data.theta.cols();

  // Every gradient, leaf weight and prediction lies in span{y_i}, so boosting
  // runs in an orthonormal basis of that span when it is smaller.
  Matrix targets;
  if (out_dim > n_samples) {
    Eigen::HouseholderQR<Matrix> qr(data.y);
    model.basis = qr.householderQ() * Matrix::Identity(out_dim, n_samples);
    targets = model.basis.transpose() * data.y;
  } else {
    targets = data.y;
  }

  Matrix pred = Matrix::Zero(targets.rows(), n_samples);
  Matrix grad(targets.rows(), n_samples);
  if (trace) {
    *trace = FitTrace{};
    trace->train_loss.push_back(half_squared_loss(targets, pred));
  }

  std::vector<int> all_rows(static_cast<std::size_t>(n_samples));
  std::iota(all_rows.begin(), all_rows.end(), 0);
  const std::size_t n_sub = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(cfg.subsample * static_cast<double>(n_samples))), 1,
      all_rows.size());
  Rng rng(cfg.rng_seed);

  for (int k = 0; k < cfg.rounds; ++k) {
    grad = pred - targets;
    GrowState st;
    st.theta = &data.theta;
    st.grad = &grad;
    st.predictions = &pred;
    st.all_rows = all_rows;
    if (n_sub < all_rows.size()) {
      std::vector<int> pool = all_rows;
      partial_shuffle(pool, n_sub, rng);
      pool.resize(n_sub);
      std::sort(pool.begin(), pool.end());
      st.grad_rows = std::move(pool);
    } else {
      st.grad_rows = all_rows;
    }
    GrowStats stats;
    Tree tree = grow_tree(st, cfg, &stats);
    for (Index i = 0; i < n_samples; ++i) {
      pred.col(i) += cfg.learning_rate * tree.leaf_weight(data.theta.row(i).transpose());
    }
    model.trees.push_back(std::move(tree));
    if (trace) {
      trace->train_loss.push_back(half_squared_loss(targets, pred));
      trace->max_pred_norm.push_back(pred.colwise().norm().maxCoeff());
      trace->solver_failures += stats.solver_failures;
    }
  }
  return model;
}

}  // namespace grasspod
