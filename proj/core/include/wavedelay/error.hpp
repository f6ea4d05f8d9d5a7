#pragma once

#include <stdexcept>
#include <string>

namespace wavedelay {

enum class ErrorCode {
  InvalidArgument,
  NotARoot,
  NearSpectrum,
  QuadratureTooCoarse,
  OnContourZero,
  MaxDepth,
  MultiplicityExceeded,
  SearchExhausted,
  WindowEmpty,
  NotFound,
};

const char* to_string(ErrorCode code);

/// Error raised by every analysis routine. `code()` identifies the failure so
/// callers (the CLI in particular) can map it onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotARoot: return "NotARoot";
    case ErrorCode::NearSpectrum: return "NearSpectrum";
    case ErrorCode::QuadratureTooCoarse: return "QuadratureTooCoarse";
    case ErrorCode::OnContourZero: return "OnContourZero";
    case ErrorCode::MaxDepth: return "MaxDepth";
    case ErrorCode::MultiplicityExceeded: return "MultiplicityExceeded";
    case ErrorCode::SearchExhausted: return "SearchExhausted";
    case ErrorCode::WindowEmpty: return "WindowEmpty";
    case ErrorCode::NotFound: return "NotFound";
  }
  return "Unknown";
}

}  // namespace wavedelay
