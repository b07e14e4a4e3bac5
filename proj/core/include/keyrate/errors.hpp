// SPDX-License-Identifier: Apache-2.0
//
// Error hierarchy for the keyrate toolkit. Every failure mode surfaced by the
// library derives from keyrate::Error so callers can catch one base type;
// the concrete classes distinguish recoverable input problems from numeric
// pathologies.

#pragma once

#include <stdexcept>
#include <string>

namespace keyrate {

// Base class for all toolkit errors.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Malformed external input (CSV rows, config lines, file names).
class ParseError : public Error {
  public:
    using Error::Error;
};

// Structurally valid input whose values violate a configuration contract
// (e.g. a correlation target that is not positive semidefinite).
class ConfigError : public Error {
  public:
    using Error::Error;
};

// Argument outside an operation's mathematical domain (e.g. |rho| >= 1 for
// the closed-form Gaussian mutual information).
class DomainError : public Error {
  public:
    using Error::Error;
};

// Input that collapses an estimator (constant series, zero variance).
class DegenerateInputError : public Error {
  public:
    using Error::Error;
};

// Input that contains nothing to operate on (no data rows, no files).
class EmptyInputError : public Error {
  public:
    using Error::Error;
};

// Numerically ill-conditioned input (e.g. a non-positive-semidefinite
// autocorrelation sequence handed to the predictor recursion).
class IllConditionedError : public Error {
  public:
    using Error::Error;
};

// Filesystem-level failure (missing file, unwritable directory).
class IoError : public Error {
  public:
    using Error::Error;
};

}  // namespace keyrate
