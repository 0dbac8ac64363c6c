#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sdnguard {

// Every failure raised by the library carries one of these codes. The CLI
// prints name() on stderr so scripts can match on it.
enum class Errc {
  NonMonotonicTimestamp,
  InsufficientData,
  SchemaMismatch,
  MissingColumn,
  UnparsableCell,
  EmptyDataset,
  NonFiniteGradient,
  EmptyEnsemble,
  ClassTooSmall,
  CorruptModelFile,
  SerializationFailure,
  InvalidInput,
  InvalidThresholds,
  InconsistentDecision,
  TableFull,
  OrphanEvent,
  UndefinedFPR,
  ZeroBaseline,
  TooFewFlows,
  IoFailure,
  InvalidConfig,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

  Errc code() const noexcept { return code_; }
  std::string_view name() const noexcept { return errc_name(code_); }

 private:
  Errc code_;
};

}  // namespace sdnguard
