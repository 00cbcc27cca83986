#include "grasspod/baseline.hpp"

#include "grasspod/error.hpp"

#include <algorithm>
#include <numeric>

namespace grasspod {

InterpScheme parse_interp_scheme(const std::string& name) {
  if (name == "auto" || name == "automatic") return InterpScheme::automatic;
  if (name == "linear1d" || name == "linear") return InterpScheme::linear1d;
  if (name == "idw") return InterpScheme::idw;
  throw InvalidArgument("unknown interpolation scheme '" + name + "'");
}

std::string to_string(InterpScheme scheme) {
  switch (scheme) {
    case InterpScheme::automatic: return "auto";
    case InterpScheme::linear1d: return "linear1d";
    case InterpScheme::idw: return "idw";
  }
  return "unknown";
}

InterpModel::InterpModel(Matrix theta, Matrix y, InterpScheme scheme, double radius)
    : theta_(std::move(theta)), y_(std::move(y)), scheme_(scheme), radius_(radius) {
  if (theta_.rows() < 1) throw InvalidArgument("interpolation needs at least one sample");
  if (y_.cols() != theta_.rows()) throw DimensionError("theta and y disagree on the sample count");
  if (!theta_.allFinite() || !y_.allFinite()) throw NonFiniteError("non-finite training data");
  if (scheme_ == InterpScheme::automatic) {
    scheme_ = theta_.cols() == 1 ? InterpScheme::linear1d : InterpScheme::idw;
  }
  for (Index i = 0; i < y_.cols(); ++i) {
    if (!(y_.col(i).norm() < radius_)) {
      throw InvalidArgument("interpolation node " + std::to_string(i) + " lies outside the ball");
    }
  }
  for (Index i = 0; i < theta_.rows(); ++i) {
    for (Index j = i + 1; j < theta_.rows(); ++j) {
      if (theta_.row(i) == theta_.row(j)) throw InvalidArgument("duplicate training parameters");
    }
  }
  if (scheme_ == InterpScheme::linear1d) {
    if (theta_.cols() != 1) throw InvalidArgument("linear1d needs a scalar parameter");
    if (theta_.rows() < 2) throw InvalidArgument("linear interpolation needs at least 2 samples");
    order_.resize(static_cast<std::size_t>(theta_.rows()));
    std::iota(order_.begin(), order_.end(), Index{0});
    std::sort(order_.begin(), order_.end(),
              [&](Index a, Index b) { return theta_(a, 0) < theta_(b, 0); });
  }
}

InterpPrediction InterpModel::linear1d(double t) const {
  InterpPrediction out;
  const Index lo_idx = order_.front();
  const Index hi_idx = order_.back();
  if (t <= theta_(lo_idx, 0)) {
    out.y = y_.col(lo_idx);
    out.extrapolated = t < theta_(lo_idx, 0);
    return out;
  }
  if (t >= theta_(hi_idx, 0)) {
    out.y = y_.col(hi_idx);
    out.extrapolated = t > theta_(hi_idx, 0);
    return out;
  }
  auto it = std::upper_bound(order_.begin(), order_.end(), t,
                             [&](double v, Index i) { return v < theta_(i, 0); });
  const Index right = *it;
  const Index left = *(it - 1);
  const double t0 = theta_(left, 0);
  const double t1 = theta_(right, 0);
  if (t == t0) {
    out.y = y_.col(left);
    return out;
  }
  const double w = (t - t0) / (t1 - t0);
  out.y = (1.0 - w) * y_.col(left) + w * y_.col(right);
  return out;
}

InterpPrediction InterpModel::idw(const Eigen::Ref<const Vector>& theta) const {
  InterpPrediction out;
  Vector weights(theta_.rows());
  for (Index i = 0; i < theta_.rows(); ++i) {
    const double d2 = (theta_.row(i).transpose() - theta).squaredNorm();
    if (d2 == 0.0) {
      out.y = y_.col(i);
      return out;
    }
    weights(i) = 1.0 / d2;
  }
  out.y = y_ * weights / weights.sum();
  for (Index k = 0; k < theta.size(); ++k) {
    if (theta(k) < theta_.col(k).minCoeff() || theta(k) > theta_.col(k).maxCoeff()) {
      out.extrapolated = true;
    }
  }
  return out;
}

InterpPrediction InterpModel::predict(const Eigen::Ref<const Vector>& theta) const {
  if (theta.size() != theta_.cols()) throw DimensionError("interp: wrong parameter dimension");
  if (!theta.allFinite()) throw NonFiniteError("interp: non-finite parameter");
  InterpPrediction out = scheme_ == InterpScheme::linear1d ? linear1d(theta(0)) : idw(theta);
  const double nrm = out.y.norm();
  if (nrm > radius_) {
    out.y *= (radius_ - 1e-9) / nrm;
    out.clipped = true;
  }
  return out;
}

InterpPrediction interp_predict(const InterpModel& model, const Eigen::Ref<const Vector>& theta) {
  return model.predict(theta);
}

}  // namespace grasspod
