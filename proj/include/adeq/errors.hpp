#pragma once

#include <stdexcept>
#include <string>

namespace adeq {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A singleton strongly connected component without a loop: no equilibrium.
class InfeasibleMarket : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class NotOptimal : public Error {
 public:
  using Error::Error;
};

class VerificationFailed : public Error {
 public:
  using Error::Error;
};

class AggregationMismatch : public Error {
 public:
  using Error::Error;
};

class InconsistentTightSet : public Error {
 public:
  using Error::Error;
};

class RoundingFailed : public Error {
 public:
  using Error::Error;
};

class SizeLimit : public Error {
 public:
  using Error::Error;
};

class NoCycleThroughNode : public Error {
 public:
  using Error::Error;
};

}  // namespace adeq
