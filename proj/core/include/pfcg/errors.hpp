#pragma once

#include <stdexcept>
#include <string>

namespace pfcg {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user configuration (grid spec, flags, mesh file contents).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Vector or matrix sizes that do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

/// Operator assembly on a degenerate grid.
class AssemblyError : public Error {
 public:
  using Error::Error;
};

/// Dense materialization refused because the matrix exceeds the cap.
class RefusalError : public Error {
 public:
  using Error::Error;
};

/// Zero or tiny pivot met during incomplete LU factorization.
class IluBreakdown : public Error {
 public:
  IluBreakdown(int row, double pivot)
      : Error("ILU0 breakdown at row " + std::to_string(row) +
              " (pivot " + std::to_string(pivot) + ")"),
        row_(row),
        pivot_(pivot) {}
  int row() const noexcept { return row_; }
  double pivot() const noexcept { return pivot_; }

 private:
  int row_;
  double pivot_;
};

/// <p, A p> <= 0 inside PCG.
class IndefiniteError : public Error {
 public:
  using Error::Error;
};

class DecompositionError : public Error {
 public:
  using Error::Error;
};

/// A collective or channel was aborted (peer failure or timeout).
class CollectiveError : public Error {
 public:
  using Error::Error;
};

/// Misuse of the worker message protocol (size mismatch, wrong membership).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};
class BadMagicError : public IoError {
 public:
  using IoError::IoError;
};
class UnsupportedVersionError : public IoError {
 public:
  using IoError::IoError;
};
class TruncatedError : public IoError {
 public:
  using IoError::IoError;
};
class MalformedError : public IoError {
 public:
  using IoError::IoError;
};
/// File dimensions or coordinates disagree with the run's grid.
class DimensionMismatchError : public IoError {
 public:
  using IoError::IoError;
};

}  // namespace pfcg
