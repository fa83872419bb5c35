#pragma once

#include <stdexcept>
#include <string>

namespace sdefw {

enum class ErrorKind {
  parameter,
  domain,
  singular,
  numeric_failure,
  inadmissible_state,
  inconclusive,
  dimension_overflow,
  budget,
  estimation,
  io,
  usage,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every failure raised by the toolkit carries one of the kinds above; the C
/// API maps them one-to-one onto status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by flow maps when a stage or a closed-form flow produces NaN/Inf.
class FlowFailure : public Error {
 public:
  FlowFailure(const std::string& what, int stage)
      : Error(ErrorKind::numeric_failure, what), stage_(stage) {}
  int stage() const noexcept { return stage_; }

 private:
  int stage_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace sdefw
