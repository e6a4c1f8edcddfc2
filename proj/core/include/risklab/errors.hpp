#pragma once

#include <stdexcept>
#include <string>

namespace risklab {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// A numerical procedure (quadrature, root search, sampling) could not
/// reach its target accuracy or produced non-finite values.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (files, datasets, configs).
class DataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class MagicMismatchError : public DataError {
  public:
    using DataError::DataError;
};

class DimensionMismatchError : public DataError {
  public:
    using DataError::DataError;
};

class TruncatedPayloadError : public DataError {
  public:
    using DataError::DataError;
};

}  // namespace risklab
