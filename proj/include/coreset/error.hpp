#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace coreset {

enum class ErrorCode {
    kInvalidArgument,
    kOutOfRange,
    kFormat,
    kIo,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::kInvalidArgument: return "invalid_argument";
        case ErrorCode::kOutOfRange: return "out_of_range";
        case ErrorCode::kFormat: return "format_error";
        case ErrorCode::kIo: return "io_error";
    }
    return "unknown";
}

// Every failure surfaced by the library carries a stable code so the CLI can
// print a one-line machine-parseable message.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, const char* what) {
    if (!condition) fail(code, what);
}

}  // namespace coreset
