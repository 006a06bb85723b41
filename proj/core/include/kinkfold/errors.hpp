#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kinkfold {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input data or arguments (CLI exit code 2).
class InputError : public Error {
 public:
  using Error::Error;
};

// Iterations or fits that failed to produce a usable result (CLI exit code 3).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class DegenerateFrame : public InputError {
 public:
  explicit DegenerateFrame(std::size_t vertex)
      : InputError("degenerate frame at vertex " + std::to_string(vertex) +
                   ": consecutive tangents are collinear"),
        vertex_(vertex) {}
  std::size_t vertex() const noexcept { return vertex_; }

 private:
  std::size_t vertex_;
};

class CoincidentVertices : public InputError {
 public:
  explicit CoincidentVertices(std::size_t vertex)
      : InputError("vertices " + std::to_string(vertex) + " and " +
                   std::to_string(vertex + 1) + " coincide"),
        vertex_(vertex) {}
  std::size_t vertex() const noexcept { return vertex_; }

 private:
  std::size_t vertex_;
};

class InconsistentLengths : public InputError {
 public:
  using InputError::InputError;
};

class IndexOutOfRange : public InputError {
 public:
  using InputError::InputError;
};

class LengthMismatch : public InputError {
 public:
  using InputError::InputError;
};

class InvalidArgument : public InputError {
 public:
  using InputError::InputError;
};

class NoSignChange : public InputError {
 public:
  using InputError::InputError;
};

class InsufficientData : public InputError {
 public:
  using InputError::InputError;
};

class NoSuchChain : public InputError {
 public:
  using InputError::InputError;
};

class NoAtoms : public InputError {
 public:
  using InputError::InputError;
};

class MalformedRecord : public InputError {
 public:
  MalformedRecord(std::size_t line, const std::string& what)
      : InputError("malformed record at line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class SchemaError : public InputError {
 public:
  using InputError::InputError;
};

class DivisionByZero : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class Diverged : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class FitDiverged : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace kinkfold
