#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace hsevo {

// Base of every error raised by the library. Callers that only need to know
// "something in hsevo failed" can catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// heuristic-archive
class DuplicateIdError : public Error {
 public:
  using Error::Error;
};
class ArchiveOrderError : public Error {
 public:
  using Error::Error;
};
class NoEliteError : public Error {
 public:
  using Error::Error;
};
class MalformedRecordError : public Error {
 public:
  MalformedRecordError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};
class IoError : public Error {
 public:
  using Error::Error;
};

// code-normalizer
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// embedding-provider
class BackendUnavailableError : public Error {
 public:
  using Error::Error;
};
class UndefinedSimilarityError : public Error {
 public:
  using Error::Error;
};

// diversity-metrics
class EmptyArchiveError : public Error {
 public:
  using Error::Error;
};
class InsufficientArchiveError : public Error {
 public:
  using Error::Error;
};

// llm-gateway
class BudgetExhaustedError : public Error {
 public:
  using Error::Error;
};
class TransportError : public Error {
 public:
  using Error::Error;
};
class MockScriptExhaustedError : public Error {
 public:
  using Error::Error;
};

enum class ExtractionErrorKind { no_fence, missing_ranges, malformed_ranges, range_order };

class ExtractionError : public Error {
 public:
  ExtractionError(ExtractionErrorKind kind, const std::string& what) : Error(what), kind_(kind) {}
  ExtractionErrorKind kind() const { return kind_; }

 private:
  ExtractionErrorKind kind_;
};

// evolution-engine
class SelectionError : public Error {
 public:
  using Error::Error;
};
class ConfigError : public Error {
 public:
  using Error::Error;
};

// harmony-search
class ParameterizationError : public Error {
 public:
  using Error::Error;
};
class HarmonySearchError : public Error {
 public:
  using Error::Error;
};

// problem-suite
class OracleTooLargeError : public Error {
 public:
  using Error::Error;
};

// A candidate heuristic failed. kind is the sandbox error kind (syntax,
// missing_function, banned_import, runtime, shape, nonfinite, timeout) or
// one raised on the client side (crash, protocol, illegal_state).
class HeuristicError : public Error {
 public:
  HeuristicError(std::string kind, const std::string& what) : Error(what), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

}  // namespace hsevo
