#include "unipos/error.h"

namespace unipos {

const char *ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return "ParseError";
    case ErrorKind::kDuplicateKey: return "DuplicateKey";
    case ErrorKind::kInvalidUniversalTag: return "InvalidUniversalTag";
    case ErrorKind::kEmptyMapping: return "EmptyMapping";
    case ErrorKind::kUnknownFineTag: return "UnknownFineTag";
    case ErrorKind::kInvalidTree: return "InvalidTree";
    case ErrorKind::kEmptyCorpus: return "EmptyCorpus";
    case ErrorKind::kInsufficientData: return "InsufficientData";
    case ErrorKind::kLengthMismatch: return "LengthMismatch";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kIo: return "IoError";
  }
  return "Error";
}

namespace {

std::string Render(ErrorKind kind, const std::string &message, int line) {
  std::string out = ErrorKindName(kind);
  if (line > 0) out += " at line " + std::to_string(line);
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorKind kind, const std::string &message, int line)
    : std::runtime_error(Render(kind, message, line)),
      kind_(kind),
      line_(line),
      message_(message) {}

bool IsDataError(ErrorKind kind) {
  return kind != ErrorKind::kInvalidArgument;
}

}  // namespace unipos
