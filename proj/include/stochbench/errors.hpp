#pragma once

#include <stdexcept>
#include <string>

namespace stochbench {

// Root of every error raised by the library. Candidate-program failures are
// never thrown; they are reported as data in RunOutcome.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
  ParseError(const std::string& what, int line, int column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

private:
  int line_;
  int column_;
};

class DuplicateName : public Error {
public:
  using Error::Error;
};

class ValidationError : public Error {
public:
  using Error::Error;
};

class InfeasibleTautology : public Error {
public:
  using Error::Error;
};

class DimensionMismatch : public Error {
public:
  using Error::Error;
};

class ProbabilityError : public Error {
public:
  using Error::Error;
};

class DomainError : public Error {
public:
  using Error::Error;
};

class UnsupportedRandomness : public Error {
public:
  using Error::Error;
};

class JointNotSupported : public Error {
public:
  using Error::Error;
};

class NumericBreakdown : public Error {
public:
  using Error::Error;
};

class CollisionError : public Error {
public:
  using Error::Error;
};

class UnboundPlaceholder : public Error {
public:
  using Error::Error;
};

class ClientError : public Error {
public:
  ClientError(const std::string& what, int status = 0)
      : Error(what), status_(status) {}

  // HTTP status reported by the provider, 0 for transport failures.
  int status() const noexcept { return status_; }

private:
  int status_;
};

class FixtureMiss : public Error {
public:
  using Error::Error;
};

class EmptyCompletion : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

class CorpusError : public Error {
public:
  CorpusError(const std::string& file, const std::string& reason)
      : Error(file + ": " + reason), file_(file) {}

  const std::string& file() const noexcept { return file_; }

private:
  std::string file_;
};

}  // namespace stochbench
