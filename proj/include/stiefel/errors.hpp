#pragma once

#include <stdexcept>
#include <string>

namespace stiefel {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes or bases do not match, or a precondition on arguments fails.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class RankDeficient : public Error {
 public:
  using Error::Error;
};

class NotSymmetric : public Error {
 public:
  using Error::Error;
};

/// The 2k x 2k Cayley system was singular: the step is too large for the Cayley map.
class RetractionFailed : public Error {
 public:
  using Error::Error;
};

/// I + X^T Y was singular: the two points are too far apart to be joined by a Cayley curve.
class InverseRetractionFailed : public Error {
 public:
  using Error::Error;
};

class DegenerateSpectrum : public Error {
 public:
  using Error::Error;
};

class DegenerateFit : public Error {
 public:
  using Error::Error;
};

class LineSearchFailed : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace stiefel
