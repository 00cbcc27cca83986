#pragma once

#include <stdexcept>
#include <string>

namespace grasspod {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// Largest principal angle reached the pi/2 cut locus of the logarithm map.
class CutLocusError : public Error {
 public:
  using Error::Error;
};

/// A basis embeds to a vector outside the open pi/2 ball of the chart.
class OutOfChartError : public Error {
 public:
  using Error::Error;
};

/// A vector handed to wrap_back lies outside the closed pi/2 ball.
class BallViolationError : public Error {
 public:
  using Error::Error;
};

class SolverFailure : public Error {
 public:
  using Error::Error;
};

class InstabilityError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace grasspod
