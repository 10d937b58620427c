#pragma once

#include <stdexcept>
#include <string>

namespace privagg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define PRIVAGG_DEFINE_ERROR(Name)          \
  class Name : public Error {               \
   public:                                  \
    using Error::Error;                     \
  }

// field / bitstrings
PRIVAGG_DEFINE_ERROR(DivisionByZero);
PRIVAGG_DEFINE_ERROR(LengthError);

// mechanisms
PRIVAGG_DEFINE_ERROR(InvalidParams);
PRIVAGG_DEFINE_ERROR(OutOfGrid);
PRIVAGG_DEFINE_ERROR(InfiniteLeakage);
PRIVAGG_DEFINE_ERROR(UndefinedLeakage);
PRIVAGG_DEFINE_ERROR(InvalidTruth);
PRIVAGG_DEFINE_ERROR(DegenerateCalibration);

// private writes
PRIVAGG_DEFINE_ERROR(ParseError);

// verification
PRIVAGG_DEFINE_ERROR(DimensionError);
PRIVAGG_DEFINE_ERROR(IncompleteSubmission);

// harness / cli
PRIVAGG_DEFINE_ERROR(ProtocolAbort);
PRIVAGG_DEFINE_ERROR(SpecError);
PRIVAGG_DEFINE_ERROR(ConfigError);

#undef PRIVAGG_DEFINE_ERROR

}  // namespace privagg
