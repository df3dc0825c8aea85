#include "dtsim/error.h"

namespace dtsim {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kSyntax: return "SyntaxError";
    case ErrorKind::kDuplicateMacro: return "DuplicateMacro";
    case ErrorKind::kUnknownMacro: return "UnknownMacro";
    case ErrorKind::kArityMismatch: return "ArityMismatch";
    case ErrorKind::kRenameOfUndefinedInnerVar: return "RenameOfUndefinedInnerVar";
    case ErrorKind::kCrossPartyExpression: return "CrossPartyExpression";
    case ErrorKind::kUseBeforeAssign: return "UseBeforeAssign";
    case ErrorKind::kReassignment: return "Reassignment";
    case ErrorKind::kBadSend: return "BadSend";
    case ErrorKind::kBadOblivious: return "BadOblivious";
    case ErrorKind::kTapeExhausted: return "TapeExhausted";
    case ErrorKind::kBadCorruptionSet: return "BadCorruptionSet";
    case ErrorKind::kHeaderMismatch: return "HeaderMismatch";
    case ErrorKind::kNonBitValue: return "NonBitValue";
    case ErrorKind::kRaggedRow: return "RaggedRow";
    case ErrorKind::kUnknownGateKind: return "UnknownGateKind";
    case ErrorKind::kTopologyViolation: return "TopologyViolation";
    case ErrorKind::kBadCircuit: return "BadCircuit";
    case ErrorKind::kUnsatisfiable: return "Unsatisfiable";
    case ErrorKind::kTimeout: return "Timeout";
    case ErrorKind::kNoSuchSite: return "NoSuchSite";
    case ErrorKind::kIncompatibleKind: return "IncompatibleKind";
    case ErrorKind::kEmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorKind::kWidthMismatch: return "WidthMismatch";
    case ErrorKind::kInsufficientData: return "InsufficientData";
    case ErrorKind::kInvalidConfig: return "InvalidConfig";
    case ErrorKind::kIo: return "IoError";
  }
  return "Unknown";
}

namespace {

std::string decorate(ErrorKind kind, const std::string& message, int line, int column) {
  std::string out = to_string(kind);
  if (line > 0) {
    out += " at " + std::to_string(line) + ":" + std::to_string(column);
  }
  out += ": " + message;
  return out;
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& message, int line, int column)
    : std::runtime_error(decorate(kind, message, line, column)),
      kind_(kind),
      line_(line),
      column_(column) {}

}  // namespace dtsim
