#include "grasspod/chart.hpp"

#include "grasspod/error.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace grasspod {

Vector vec(const Matrix& z) { return Eigen::Map<const Vector>(z.data(), z.size()); }

Matrix mat(const Vector& v, Index n, Index r) {
  if (v.size() != n * r) throw DimensionError("mat: length is not n*r");
  return Eigen::Map<const Matrix>(v.data(), n, r);
}

Chart::Chart(PodBasis reference) : reference_(std::move(reference)) {
  const Index n = reference_.n();
  const Index r = reference_.r();
  reflectors_.resize(n, r);
  betas_.resize(r);
  for (Index i = 0; i < r; ++i) {
    Vector v = reference_.matrix().col(i);
    v(0) += v(0) >= 0.0 ? 1.0 : -1.0;
    reflectors_.col(i) = v;
    betas_(i) = 2.0 / v.squaredNorm();
  }
}

Chart Chart::from_parts(PodBasis reference, Matrix reflectors) {
  if (reflectors.rows() != reference.n() || reflectors.cols() != reference.r()) {
    throw DimensionError("chart reflectors do not match the reference shape");
  }
  if (!reflectors.allFinite()) throw NonFiniteError("chart reflectors are not finite");
  Chart c;
  c.reference_ = std::move(reference);
  c.betas_.resize(reflectors.cols());
  for (Index i = 0; i < reflectors.cols(); ++i) {
    const double sq = reflectors.col(i).squaredNorm();
    if (!(sq > 0.0)) throw FormatError("chart reflector has zero norm");
    c.betas_(i) = 2.0 / sq;
  }
  c.reflectors_ = std::move(reflectors);
  return c;
}

Vector Chart::apply_f(const Vector& x) const {
  const Index n = this->n();
  const Index r = this->r();
  if (x.size() != n * r) throw DimensionError("apply_f: expected a vector of length nr");
  Vector y(dim());
  for (Index i = 0; i < r; ++i) {
    const auto v = reflectors_.col(i);
    const auto xi = x.segment(i * n, n);
    const double coef = betas_(i) * v.dot(xi);
    y.segment(i * (n - 1), n - 1) = xi.tail(n - 1) - coef * v.tail(n - 1);
  }
  return y;
}

Vector Chart::apply_ft(const Vector& y) const {
  const Index n = this->n();
  const Index r = this->r();
  if (y.size() != dim()) throw DimensionError("apply_ft: expected a vector of length nr - r");
  Vector x(n * r);
  for (Index i = 0; i < r; ++i) {
    const auto v = reflectors_.col(i);
    const auto yi = y.segment(i * (n - 1), n - 1);
    const double coef = betas_(i) * v.tail(n - 1).dot(yi);
    auto xi = x.segment(i * n, n);
    xi(0) = -coef * v(0);
    xi.tail(n - 1) = yi - coef * v.tail(n - 1);
  }
  return x;
}

Matrix Chart::dense_f() const {
  const Index nr = n() * r();
  Matrix f(dim(), nr);
  Vector e = Vector::Zero(nr);
  for (Index k = 0; k < nr; ++k) {
    e(k) = 1.0;
    f.col(k) = apply_f(e);
    e(k) = 0.0;
  }
  return f;
}

Vector embed(const Chart& chart, const PodBasis& basis) {
  const HorizontalLift lift = log_map(chart.reference(), basis);
  Vector y = chart.apply_f(vec(lift.z));
  const double norm = y.norm();
  if (!(norm < chart.radius())) {
    throw OutOfChartError("embedded vector has norm " + std::to_string(norm) +
                          " >= pi/2; basis is outside the injectivity ball");
  }
  return y;
}

PodBasis wrap_back(const Chart& chart, const Vector& y) {
  if (y.size() != chart.dim()) throw DimensionError("wrap_back: wrong embedding dimension");
  if (!y.allFinite()) throw NonFiniteError("wrap_back: non-finite vector");
  const double norm = y.norm();
  if (norm > chart.radius() + 1e-9) {
    throw BallViolationError("wrap_back: ||y|| = " + std::to_string(norm) + " exceeds pi/2");
  }
  const Matrix z = mat(chart.apply_ft(y), chart.n(), chart.r());
  return exp_map(chart.reference(), HorizontalLift{z});
}

ReferencePolicy parse_reference_policy(const std::string& name) {
  if (name == "minimax") return ReferencePolicy::minimax;
  if (name == "first") return ReferencePolicy::first;
  if (name == "index") return ReferencePolicy::index;
  throw InvalidArgument("unknown reference policy '" + name + "'");
}

std::string to_string(ReferencePolicy policy) {
  switch (policy) {
    case ReferencePolicy::minimax: return "minimax";
    case ReferencePolicy::first: return "first";
    case ReferencePolicy::index: return "index";
  }
  return "unknown";
}

ReferenceChoice select_reference(const std::vector<PodBasis>& bases, ReferencePolicy policy,
                                 std::size_t explicit_index,
                                 const std::vector<std::string>& labels, bool drop_unreachable) {
  const std::size_t count = bases.size();
  if (count == 0) throw InvalidArgument("select_reference: no bases");

  // reachable(i, j): basis j embeds strictly inside the chart centered at i.
  Matrix dist = Matrix::Zero(count, count);
  std::vector<char> reachable(count * count, 1);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = i + 1; j < count; ++j) {
      const Vector angles = principal_angles(bases[i], bases[j]);
      const double d = angles.norm();
      dist(i, j) = dist(j, i) = d;
      const bool ok = d < kHalfPi && angles.maxCoeff() < kHalfPi - kCutLocusMargin;
      reachable[i * count + j] = reachable[j * count + i] = ok ? 1 : 0;
    }
  }
  auto reach_count = [&](std::size_t i) {
    return std::count(reachable.begin() + static_cast<std::ptrdiff_t>(i * count),
                      reachable.begin() + static_cast<std::ptrdiff_t>((i + 1) * count), 1);
  };
  auto worst_reachable = [&](std::size_t i) {
    double w = 0.0;
    for (std::size_t j = 0; j < count; ++j) {
      if (reachable[i * count + j]) w = std::max(w, dist(static_cast<Index>(i), static_cast<Index>(j)));
    }
    return w;
  };

  std::size_t chosen = 0;
  switch (policy) {
    case ReferencePolicy::first: chosen = 0; break;
    case ReferencePolicy::index:
      if (explicit_index >= count) throw InvalidArgument("reference index out of range");
      chosen = explicit_index;
      break;
    case ReferencePolicy::minimax: {
      // With dropping enabled the candidate that keeps the most bases wins
      // first; the minimax distance breaks ties.
      double best = std::numeric_limits<double>::infinity();
      std::ptrdiff_t best_kept = -1;
      for (std::size_t i = 0; i < count; ++i) {
        const std::ptrdiff_t kept = drop_unreachable ? reach_count(i) : 0;
        const double worst =
            drop_unreachable ? worst_reachable(i) : dist.row(static_cast<Index>(i)).maxCoeff();
        if (kept > best_kept || (kept == best_kept && worst < best)) {
          best_kept = kept;
          best = worst;
          chosen = i;
        }
      }
      break;
    }
  }

  std::vector<std::size_t> offending;
  for (std::size_t j = 0; j < count; ++j) {
    if (!reachable[chosen * count + j]) offending.push_back(j);
  }
  if (!offending.empty() && !drop_unreachable) {
    std::ostringstream msg;
    msg << "no admissible chart: reference " << chosen << " leaves " << offending.size()
        << " basis(es) outside the pi/2 ball:";
    for (std::size_t j : offending) {
      msg << ' ' << (j < labels.size() ? labels[j] : std::to_string(j));
      msg << " (d=" << dist(static_cast<Index>(chosen), static_cast<Index>(j)) << ")";
    }
    throw OutOfChartError(msg.str());
  }
  return {chosen, worst_reachable(chosen), std::move(offending)};
}

}  // namespace grasspod
