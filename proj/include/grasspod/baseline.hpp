#pragma once

#include "grasspod/grassmann.hpp"

#include <string>

namespace grasspod {

enum class InterpScheme {
  automatic,  ///< linear1d for one parameter, idw otherwise
  linear1d,
  idw,
};

InterpScheme parse_interp_scheme(const std::string& name);
std::string to_string(InterpScheme scheme);

struct InterpPrediction {
  Vector y;
  bool clipped = false;       ///< result was pulled back inside the ball
  bool extrapolated = false;  ///< query left the training parameter range
};

/// Tangent-space interpolation of embedded bases (the comparison baseline).
class InterpModel {
 public:
  /// `theta` is N x d, `y` is dim x N (column i belongs to row i).
  InterpModel(Matrix theta, Matrix y, InterpScheme scheme = InterpScheme::automatic,
              double radius = kHalfPi);

  InterpPrediction predict(const Eigen::Ref<const Vector>& theta) const;

  InterpScheme scheme() const { return scheme_; }
  Index size() const { return theta_.rows(); }

 private:
  InterpPrediction linear1d(double t) const;
  InterpPrediction idw(const Eigen::Ref<const Vector>& theta) const;

  Matrix theta_;
  Matrix y_;
  InterpScheme scheme_;
  double radius_;
  std::vector<Index> order_;  // samples sorted by theta (1-D only)
};

/// Same as InterpModel::predict.
InterpPrediction interp_predict(const InterpModel& model, const Eigen::Ref<const Vector>& theta);

}  // namespace grasspod
