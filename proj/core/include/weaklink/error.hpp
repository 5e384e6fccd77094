#pragma once

#include <stdexcept>
#include <string>

namespace weaklink {

/// Error categories; each maps onto one CLI exit code.
enum class ErrorKind {
  Domain,            // argument outside a model's validity range
  ModelValidity,     // model assumptions violated (e.g. E_Th >= Delta)
  InsufficientData,  // too few points for the requested estimate
  Schema,            // malformed or inconsistent input file
  Convergence,       // iterative method did not converge
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::Domain, what) {}
};

class ModelValidityError : public Error {
 public:
  explicit ModelValidityError(const std::string& what)
      : Error(ErrorKind::ModelValidity, what) {}
};

class InsufficientDataError : public Error {
 public:
  explicit InsufficientDataError(const std::string& what)
      : Error(ErrorKind::InsufficientData, what) {}
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& what) : Error(ErrorKind::Schema, what) {}
};

class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(const std::string& what)
      : Error(ErrorKind::Convergence, what) {}
};

/// 2 schema, 3 model validity (domain, insufficient data), 4 non-convergence.
int exit_code(ErrorKind kind) noexcept;

const char* to_string(ErrorKind kind) noexcept;

}  // namespace weaklink
