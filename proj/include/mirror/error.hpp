#pragma once

#include <stdexcept>
#include <string>

namespace mirror {

/// Machine-parsable failure categories. The CLI prints these verbatim as
/// "<category>: <message>" so scripts can branch on the first token.
enum class Errc {
  NotAPermutation,
  NotInvolutive,
  LengthMismatch,
  EmptyShape,
  ZeroSize,
  InsufficientData,
  ConstantInput,
  MissingError,
  MTooLarge,
  MMismatch,
  UniverseMismatch,
  DegenerateShapes,
  SingularSystem,
  OutlierUnsupported,
  NoBadLabels,
  Unachievable,
  MalformedRow,
  InconsistentK,
  DuplicateId,
  MissingEntry,
  IoError,
  BadConfig,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NotAPermutation: return "NotAPermutation";
    case Errc::NotInvolutive: return "NotInvolutive";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::EmptyShape: return "EmptyShape";
    case Errc::ZeroSize: return "ZeroSize";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::ConstantInput: return "ConstantInput";
    case Errc::MissingError: return "MissingError";
    case Errc::MTooLarge: return "MTooLarge";
    case Errc::MMismatch: return "MMismatch";
    case Errc::UniverseMismatch: return "UniverseMismatch";
    case Errc::DegenerateShapes: return "DegenerateShapes";
    case Errc::SingularSystem: return "SingularSystem";
    case Errc::OutlierUnsupported: return "OutlierUnsupported";
    case Errc::NoBadLabels: return "NoBadLabels";
    case Errc::Unachievable: return "Unachievable";
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::InconsistentK: return "InconsistentK";
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::MissingEntry: return "MissingEntry";
    case Errc::IoError: return "IoError";
    case Errc::BadConfig: return "BadConfig";
  }
  return "UnknownError";
}

/// All library failures surface as this exception type; `code()` carries the
/// category, `what()` the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }
  const char* name() const noexcept { return errc_name(code_); }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace mirror
