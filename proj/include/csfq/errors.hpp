#pragma once

#include <stdexcept>
#include <string>

namespace csfq {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define CSFQ_DEFINE_ERROR(name)              \
  struct name : Error {                      \
    using Error::Error;                      \
  }

CSFQ_DEFINE_ERROR(NonPositiveDefinite);
CSFQ_DEFINE_ERROR(ConvergenceFailure);
CSFQ_DEFINE_ERROR(QuadratureFailure);
CSFQ_DEFINE_ERROR(FactorizationFailure);
CSFQ_DEFINE_ERROR(IllConditioned);
CSFQ_DEFINE_ERROR(SingularSystem);
CSFQ_DEFINE_ERROR(OutOfDomain);
CSFQ_DEFINE_ERROR(BothZero);
CSFQ_DEFINE_ERROR(DegenerateResonance);
CSFQ_DEFINE_ERROR(IntegrationFailure);
CSFQ_DEFINE_ERROR(StepTooCoarse);
CSFQ_DEFINE_ERROR(BracketingFailure);
CSFQ_DEFINE_ERROR(IndexOutOfRange);
CSFQ_DEFINE_ERROR(UnphysicalInput);
CSFQ_DEFINE_ERROR(ParseError);
CSFQ_DEFINE_ERROR(ValidationError);

#undef CSFQ_DEFINE_ERROR

}  // namespace csfq
