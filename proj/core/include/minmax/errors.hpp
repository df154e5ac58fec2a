#pragma once

#include <stdexcept>
#include <string>

namespace minmax {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A pivot underflowed (or became non-finite) during LDLt factorization.
class FactorizationBreakdown : public Error {
 public:
  using Error::Error;
};

/// A solve was requested on factors that report zero eigenvalues.
class SingularSystem : public Error {
 public:
  using Error::Error;
};

/// The epsilon growth schedule hit its step cap before the inertia targets
/// were reached.
class EpsilonCapExceeded : public Error {
 public:
  using Error::Error;
};

/// A slack or inequality multiplier is not strictly positive.
class DomainViolation : public Error {
 public:
  using Error::Error;
};

/// A user callback produced output of the wrong shape or non-finite values.
class CallbackFailure : public Error {
 public:
  using Error::Error;
};

class UnknownProblem : public Error {
 public:
  using Error::Error;
};

class CertificationFailure : public Error {
 public:
  using Error::Error;
};

/// The fraction-to-boundary step length collapsed.
class StalledStep : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration text or an unknown configuration key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace minmax
