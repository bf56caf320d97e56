#pragma once

#include <stdexcept>
#include <string>

namespace swave {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied value violates a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Two objects that must live on the same grid or basis do not.
class GridMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Requested mode count or mollifier width is not resolved by the grid.
class ResolutionError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// solve_free_series was handed a problem with nonzero a or b.
class NonZeroCoupling : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// A consistency study was requested for a singular coefficient.
class SpecNotSmooth : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Failure of a numerical kernel: no convergence, singular matrix, non-finite state.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// lambda^s is undefined because the spectrum reaches zero or below.
class NegativeSpectrum : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace swave
