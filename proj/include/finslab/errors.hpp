#pragma once

#include <stdexcept>
#include <string>

namespace finslab {

/// Base of every error raised by the library. Each failure mode of the
/// public operations gets its own subclass so callers can catch narrowly.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define FINSLAB_DEFINE_ERROR(Name)                 \
  class Name : public Error {                      \
   public:                                         \
    explicit Name(const std::string& what)         \
        : Error(std::string(#Name ": ") + what) {} \
  }

// minkowski
FINSLAB_DEFINE_ERROR(ZeroBaseVector);
FINSLAB_DEFINE_ERROR(NotPositiveDefinite);
FINSLAB_DEFINE_ERROR(NoConvergence);
// navigation
FINSLAB_DEFINE_ERROR(WindTooStrong);
// sphere
FINSLAB_DEFINE_ERROR(NotSkew);
FINSLAB_DEFINE_ERROR(DimensionMismatch);
FINSLAB_DEFINE_ERROR(LambdaOutOfRange);
// curvature
FINSLAB_DEFINE_ERROR(ChartBoundary);
FINSLAB_DEFINE_ERROR(DifferentiationFailure);
FINSLAB_DEFINE_ERROR(DegenerateFlag);
// isoparametric
FINSLAB_DEFINE_ERROR(CriticalPoint);
FINSLAB_DEFINE_ERROR(StencilEscape);
FINSLAB_DEFINE_ERROR(EmptyLevel);
FINSLAB_DEFINE_ERROR(ClusterAmbiguity);
// clifford
FINSLAB_DEFINE_ERROR(UnsupportedSplit);
FINSLAB_DEFINE_ERROR(RankDeficiency);
FINSLAB_DEFINE_ERROR(NotOnFocalSet);
// experiment harness
FINSLAB_DEFINE_ERROR(UnknownCheck);
FINSLAB_DEFINE_ERROR(ConfigError);
FINSLAB_DEFINE_ERROR(ParseError);

#undef FINSLAB_DEFINE_ERROR

}  // namespace finslab
