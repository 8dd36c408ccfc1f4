#ifndef UNIPOS_ERROR_H_
#define UNIPOS_ERROR_H_

#include <stdexcept>
#include <string>

namespace unipos {

enum class ErrorKind {
  kParse,
  kDuplicateKey,
  kInvalidUniversalTag,
  kEmptyMapping,
  kUnknownFineTag,
  kInvalidTree,
  kEmptyCorpus,
  kInsufficientData,
  kLengthMismatch,
  kInvalidArgument,
  kIo,
};

const char *ErrorKindName(ErrorKind kind);

// Every failure raised by the library. `line` is 1-based when the error is
// tied to a position in an input document, 0 otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &message, int line = 0);

  ErrorKind kind() const { return kind_; }
  int line() const { return line_; }
  const std::string &message() const { return message_; }

 private:
  ErrorKind kind_;
  int line_;
  std::string message_;
};

// True for errors caused by bad input data (as opposed to bad arguments).
bool IsDataError(ErrorKind kind);

}  // namespace unipos

#endif  // UNIPOS_ERROR_H_
