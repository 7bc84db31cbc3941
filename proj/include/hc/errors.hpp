#pragma once

#include <stdexcept>
#include <string>

namespace hc {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a distribution or function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Structurally invalid parameter (bad grid size, bad Haar level...).
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Requested depth exceeds the configured capacity.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Scale parameters outside the regime where the error bound applies.
class RegimeError : public Error {
 public:
  using Error::Error;
};

/// Corner (u, v) not aligned with the chosen dyadic scale.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

/// Operation needs data that the realization did not retain.
class ModeError : public Error {
 public:
  using Error::Error;
};

/// Internal invariant broken; always a bug.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Integer accumulation would overflow.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// Bad configuration (CLI or config file).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace hc
