#pragma once

#include <stdexcept>
#include <string>

namespace netinf {

// Error categories map onto CLI exit codes (usage 2, data 3, numerical 4).
enum class ErrorKind {
  InvalidInput,
  InvalidParameter,
  DegenerateVariance,
  DegenerateEntity,
  InvalidPValue,
  InvalidDof,
  DimensionMismatch,
  Convergence,
  Io,
  Usage,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace netinf
