#pragma once

#include <stdexcept>
#include <string>

namespace landscape {

/// Base for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define LANDSCAPE_DEFINE_ERROR(Name)     \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  };

LANDSCAPE_DEFINE_ERROR(ShapeError)
LANDSCAPE_DEFINE_ERROR(DomainError)
LANDSCAPE_DEFINE_ERROR(SamplerError)
LANDSCAPE_DEFINE_ERROR(SizeError)
LANDSCAPE_DEFINE_ERROR(ConvergenceError)
LANDSCAPE_DEFINE_ERROR(PlanError)
LANDSCAPE_DEFINE_ERROR(NotCriticalError)
LANDSCAPE_DEFINE_ERROR(NoNegativeCurvature)
LANDSCAPE_DEFINE_ERROR(Diverged)
LANDSCAPE_DEFINE_ERROR(PreconditionFailed)
LANDSCAPE_DEFINE_ERROR(RankError)
LANDSCAPE_DEFINE_ERROR(SingularError)
LANDSCAPE_DEFINE_ERROR(ImageError)
LANDSCAPE_DEFINE_ERROR(DegenerateData)
LANDSCAPE_DEFINE_ERROR(InfeasibleSigns)
LANDSCAPE_DEFINE_ERROR(FormatError)

#undef LANDSCAPE_DEFINE_ERROR

}  // namespace landscape
