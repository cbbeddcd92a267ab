#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ocad {

enum class ErrorKind {
  kMalformedDocument,
  kDanglingReference,
  kDuplicateId,
  kUnknownObject,
  kNoObjectsOfType,
  kMixedAttributeType,
  kTypeMismatch,
  kAllColumnsDropped,
  kEmptyKeepSet,
  kInvalidArgument,
  kTooFewRows,
  kKTooLarge,
  kRowMismatch,
  kEmptyMatrix,
  kInvalidConfig,
  kTimeout,
  kHttpError,
  kResponseSchema,
  kIo,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kMalformedDocument: return "MalformedDocument";
    case ErrorKind::kDanglingReference: return "DanglingReference";
    case ErrorKind::kDuplicateId: return "DuplicateId";
    case ErrorKind::kUnknownObject: return "UnknownObject";
    case ErrorKind::kNoObjectsOfType: return "NoObjectsOfType";
    case ErrorKind::kMixedAttributeType: return "MixedAttributeType";
    case ErrorKind::kTypeMismatch: return "TypeMismatch";
    case ErrorKind::kAllColumnsDropped: return "AllColumnsDropped";
    case ErrorKind::kEmptyKeepSet: return "EmptyKeepSet";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kTooFewRows: return "TooFewRows";
    case ErrorKind::kKTooLarge: return "KTooLarge";
    case ErrorKind::kRowMismatch: return "RowMismatch";
    case ErrorKind::kEmptyMatrix: return "EmptyMatrix";
    case ErrorKind::kInvalidConfig: return "InvalidConfig";
    case ErrorKind::kTimeout: return "Timeout";
    case ErrorKind::kHttpError: return "HttpError";
    case ErrorKind::kResponseSchema: return "ResponseSchema";
    case ErrorKind::kIo: return "Io";
  }
  return "Unknown";
}

// Every failure raised by the library carries a machine-readable kind so the
// CLI can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised for HTTP responses with a non-2xx status.
class HttpError : public Error {
 public:
  HttpError(int status, const std::string& body)
      : Error(ErrorKind::kHttpError,
              "status " + std::to_string(status) + ": " + body),
        status_(status) {}

  int status() const noexcept { return status_; }

 private:
  int status_;
};

}  // namespace ocad
