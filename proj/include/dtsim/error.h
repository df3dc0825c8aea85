#pragma once

#include <stdexcept>
#include <string>

namespace dtsim {

enum class ErrorKind {
  kSyntax,
  kDuplicateMacro,
  kUnknownMacro,
  kArityMismatch,
  kRenameOfUndefinedInnerVar,
  kCrossPartyExpression,
  kUseBeforeAssign,
  kReassignment,
  kBadSend,
  kBadOblivious,
  kTapeExhausted,
  kBadCorruptionSet,
  kHeaderMismatch,
  kNonBitValue,
  kRaggedRow,
  kUnknownGateKind,
  kTopologyViolation,
  kBadCircuit,
  kUnsatisfiable,
  kTimeout,
  kNoSuchSite,
  kIncompatibleKind,
  kEmptyTrainingSet,
  kWidthMismatch,
  kInsufficientData,
  kInvalidConfig,
  kIo,
};

const char* to_string(ErrorKind kind);

// All library failures are reported as this exception. Syntax errors carry a
// 1-based source position; other kinds leave line/column at 0.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, int line = 0, int column = 0);

  ErrorKind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  ErrorKind kind_;
  int line_;
  int column_;
};

}  // namespace dtsim
