#ifndef DYNLAB_ERROR_HPP
#define DYNLAB_ERROR_HPP

#include <stdexcept>
#include <string>

namespace dynlab {

/// Error categories, mirrored by the C API status codes.
enum class ErrorCode {
  invalid_argument = 1,
  parse = 2,
  unsupported = 3,
  io = 4,
  internal = 5,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void throw_invalid(const std::string& what) {
  throw Error(ErrorCode::invalid_argument, what);
}
[[noreturn]] inline void throw_parse(const std::string& what) {
  throw Error(ErrorCode::parse, what);
}
[[noreturn]] inline void throw_unsupported(const std::string& what) {
  throw Error(ErrorCode::unsupported, what);
}
[[noreturn]] inline void throw_io(const std::string& what) {
  throw Error(ErrorCode::io, what);
}

} // namespace dynlab

#endif
