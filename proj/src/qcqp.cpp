#include "grasspod/cxgboost.hpp"

#include "grasspod/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace grasspod {
namespace {

constexpr int kMaxSweeps = 10000;
constexpr double kTol = 1e-10;

// Projection of `a` onto the intersection of balls B(p_i, R) in a space of
// small dimension. The leaf QCQP reduces to this because its Hessian is a
// multiple of the identity.
struct BallProjection {
  const Vector& a;
  const Matrix& p;  // one ball center per column
  double radius;

  bool feasible(const Vector& x, double slack) const {
    const double lim = (radius + slack) * (radius + slack);
    for (Index i = 0; i < p.cols(); ++i) {
      if ((x - p.col(i)).squaredNorm() > lim) return false;
    }
    return true;
  }

  double max_violation(const Vector& x) const {
    double worst = 0.0;
    for (Index i = 0; i < p.cols(); ++i) {
      worst = std::max(worst, (x - p.col(i)).norm() - radius);
    }
    return worst;
  }

  Vector project_one(const Vector& x, Index i) const {
    const Vector d = x - p.col(i);
    const double nrm = d.norm();
    if (nrm <= radius) return x;
    return p.col(i) + (radius / nrm) * d;
  }

  // Optimal when the projection onto a single violated ball lands inside all
  // the others.
  std::optional<Vector> single_ball() const {
    std::vector<Index> order(static_cast<std::size_t>(p.cols()));
    std::iota(order.begin(), order.end(), Index{0});
    Vector excess(p.cols());
    for (Index i = 0; i < p.cols(); ++i) excess(i) = (a - p.col(i)).norm() - radius;
    std::stable_sort(order.begin(), order.end(),
                     [&](Index l, Index r) { return excess(l) > excess(r); });
    for (Index i : order) {
      if (excess(i) <= 0.0) break;
      Vector x = project_one(a, i);
      if (feasible(x, 1e-13)) return x;
    }
    return std::nullopt;
  }

  struct DykstraResult {
    Vector x;
    Matrix increments;
    bool converged = false;
  };

  DykstraResult dykstra() const {
    DykstraResult out{a, Matrix::Zero(a.size(), p.cols()), false};
    Vector& x = out.x;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
      double change = 0.0;
      for (Index i = 0; i < p.cols(); ++i) {
        const Vector y = x + out.increments.col(i);
        const Vector next = project_one(y, i);
        const Vector inc = y - next;
        change += (next - x).squaredNorm() + (inc - out.increments.col(i)).squaredNorm();
        out.increments.col(i) = inc;
        x = next;
      }
      if (std::sqrt(change) <= kTol * (1.0 + x.norm()) && max_violation(x) <= kTol) {
        out.converged = true;
        break;
      }
    }
    return out;
  }

  // Newton iterations on the KKT system restricted to an active set.
  std::optional<Vector> polish(const Vector& start, std::vector<Index> active) const {
    const Index dim = a.size();
    for (int attempt = 0; attempt < 4 && !active.empty(); ++attempt) {
      const Index m = static_cast<Index>(active.size());
      Vector x = start;
      Matrix b(dim, m);
      for (Index k = 0; k < m; ++k) b.col(k) = x - p.col(active[k]);
      Vector mu = b.completeOrthogonalDecomposition().solve(a - x);

      auto residual = [&](Vector& res) {
        for (Index k = 0; k < m; ++k) b.col(k) = x - p.col(active[k]);
        res.resize(dim + m);
        res.head(dim) = (x - a) + b * mu;
        for (Index k = 0; k < m; ++k) res(dim + k) = 0.5 * (b.col(k).squaredNorm() - radius * radius);
        return res.norm();
      };
      const double scale = 1.0 + a.norm() + radius;
      Vector res;
      for (int it = 0; it < 50; ++it) {
        if (residual(res) <= 1e-14 * scale) break;
        Matrix jac = Matrix::Zero(dim + m, dim + m);
        jac.topLeftCorner(dim, dim).diagonal().setConstant(1.0 + mu.sum());
        jac.topRightCorner(dim, m) = b;
        jac.bottomLeftCorner(m, dim) = b.transpose();
        const Vector step = jac.completeOrthogonalDecomposition().solve(-res);
        if (!step.allFinite()) break;
        x += step.head(dim);
        mu += step.tail(m);
      }
      const bool ok = x.allFinite() && mu.allFinite() && residual(res) <= 1e-11 * scale;
      if (!ok || !x.allFinite()) return std::nullopt;

      std::vector<Index> keep;
      for (Index k = 0; k < m; ++k) {
        if (mu(k) >= -1e-12) keep.push_back(active[k]);
      }
      if (keep.size() == active.size()) {
        if (!feasible(x, 1e-12)) return std::nullopt;
        return x;
      }
      active = std::move(keep);
    }
    return std::nullopt;
  }
};

// Largest t in [0, 1] keeping t * w inside every ball ||. + c_i|| <= radius.
Vector restore_feasibility(const Vector& w, const Matrix& centers, double radius) {
  const double a = w.squaredNorm();
  if (a == 0.0) return w;
  double t = 1.0;
  for (Index i = 0; i < centers.cols(); ++i) {
    const auto c = centers.col(i);
    if ((w + c).squaredNorm() <= radius * radius) continue;
    const double b = w.dot(c);
    const double cc = c.squaredNorm() - radius * radius;
    const double disc = b * b - a * cc;
    const double ti = disc < 0.0 ? 0.0 : std::clamp((-b + std::sqrt(disc)) / a, 0.0, 1.0);
    t = std::min(t, ti);
  }
  Vector out = t * w;
  // Rounding can leave a violation of a few ulps; shave it off.
  for (int k = 0; k < 8; ++k) {
    bool ok = true;
    for (Index i = 0; i < centers.cols(); ++i) {
      if ((out + centers.col(i)).norm() > radius && centers.col(i).norm() <= radius) ok = false;
    }
    if (ok) break;
    out *= 1.0 - 1e-15 * (1 << k);
  }
  return out;
}

}  // namespace

double leaf_objective(const LeafProblem& p, const Vector& w) {
  return p.g_sum.dot(w) + 0.5 * (p.h_scale + p.lambda) * w.squaredNorm();
}

Vector solve_leaf_qcqp(const LeafProblem& prob, double radius) {
  const double curvature = prob.h_scale + prob.lambda;
  if (!(curvature > 0.0)) throw InvalidArgument("leaf QCQP needs h_scale + lambda > 0");
  if (prob.centers.size() > 0 && prob.centers.rows() != prob.g_sum.size()) {
    throw DimensionError("leaf QCQP centers do not match gradient dimension");
  }
  if (!prob.g_sum.allFinite() || !prob.centers.allFinite()) {
    throw NonFiniteError("leaf QCQP has non-finite data");
  }
  for (Index i = 0; i < prob.centers.cols(); ++i) {
    if (prob.centers.col(i).norm() > radius + 1e-9) {
      throw InvalidArgument("leaf QCQP center outside the closed ball; w = 0 is infeasible");
    }
  }

  const Vector unconstrained = -prob.g_sum / curvature;
  const Index m = prob.centers.cols();
  bool inside = true;
  for (Index i = 0; i < m && inside; ++i) {
    inside = (unconstrained + prob.centers.col(i)).squaredNorm() <= radius * radius;
  }
  if (inside) return unconstrained;

  // The minimizer lies in span{unconstrained, centers}; solve there.
  const Index full_dim = unconstrained.size();
  Matrix q;
  Vector a;
  Matrix p;
  const bool reduce = full_dim > m + 1;
  if (reduce) {
    Matrix span(full_dim, m + 1);
    span.col(0) = unconstrained;
    span.rightCols(m) = -prob.centers;
    Eigen::HouseholderQR<Matrix> qr(span);
    q = qr.householderQ() * Matrix::Identity(full_dim, m + 1);
    a = q.transpose() * unconstrained;
    p = -(q.transpose() * prob.centers);
  } else {
    a = unconstrained;
    p = -prob.centers;
  }

  const BallProjection proj{a, p, radius};
  std::optional<Vector> x = proj.single_ball();
  if (!x) {
    const auto dyk = proj.dykstra();
    std::vector<Index> active;
    const double scale = 1.0 + a.norm();
    for (Index i = 0; i < m; ++i) {
      const bool touching = (dyk.x - p.col(i)).norm() >= radius - 1e-9;
      if (touching || dyk.increments.col(i).norm() > 1e-13 * scale) active.push_back(i);
    }
    x = proj.polish(dyk.x, active);
    if (!x) {
      if (!dyk.converged) throw SolverFailure("leaf QCQP did not converge");
      x = dyk.x;
    } else if (dyk.converged && (*x - a).squaredNorm() > (dyk.x - a).squaredNorm() + 1e-12) {
      x = dyk.x;
    }
  }

  Vector w = reduce ? Vector(q * *x) : *x;
  return restore_feasibility(w, prob.centers, radius);
}

}  // namespace grasspod
