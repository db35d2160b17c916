#pragma once

#include <stdexcept>
#include <string>

namespace steerkit {

// Failure classes. Each maps to one CLI exit code.
enum class ErrorKind {
  Validation = 2,
  InsufficientData = 3,
  OutOfRegime = 4,
  Internal = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }
  const char* kind_name() const noexcept {
    switch (kind_) {
      case ErrorKind::Validation: return "validation";
      case ErrorKind::InsufficientData: return "insufficient_data";
      case ErrorKind::OutOfRegime: return "out_of_regime";
      case ErrorKind::Internal: return "internal";
    }
    return "internal";
  }

 private:
  ErrorKind kind_;
};

// Invariant-violating input (non-Hermitian state, wrong shape, bad file).
struct ValidationError : Error {
  explicit ValidationError(const std::string& w) : Error(ErrorKind::Validation, w) {}
};

// Parameter outside its mathematical domain (mu > 1, d < 2, ...).
struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error(ErrorKind::Validation, w) {}
};

// Caller broke an operation precondition (e.g. non-canonical frame).
struct ContractError : Error {
  explicit ContractError(const std::string& w) : Error(ErrorKind::Validation, w) {}
};

struct InsufficientDataError : Error {
  explicit InsufficientDataError(const std::string& w)
      : Error(ErrorKind::InsufficientData, w) {}
};

struct OutOfRegimeError : Error {
  explicit OutOfRegimeError(const std::string& w) : Error(ErrorKind::OutOfRegime, w) {}
};

struct SolverError : Error {
  explicit SolverError(const std::string& w) : Error(ErrorKind::Internal, w) {}
};

}  // namespace steerkit
