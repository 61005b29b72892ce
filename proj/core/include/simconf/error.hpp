#pragma once

#include <stdexcept>
#include <string>

namespace simconf {

// Error taxonomy mirrors the CLI exit codes: usage errors exit 2,
// data/validation errors exit 3, numeric errors exit 4.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller passed an out-of-range parameter, unknown method/metric name, or
// violated an operation precondition.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Bad input data: unreadable files, malformed JSON, corpus validation
// failures, missing rewards or log-probabilities, single-class labels.
class DataError : public Error {
 public:
  using Error::Error;
};

// Numerical failure: non-convergence, degenerate fits.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Degenerate Beta fit (no spread in the values). Callers may jitter and
// retry, so this is distinguished from other numeric failures.
class ZeroVarianceError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace simconf
