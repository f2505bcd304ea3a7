#pragma once

#include <stdexcept>
#include <string>

namespace hostscope {

/// Failure categories. The numeric values are shared with the C API.
enum class errc {
  invalid_argument = 1,
  io = 2,
  parse = 3,
  unsupported = 4,
  version = 5,
  schema = 6,
  corrupt = 7,
  stage = 8,
  data = 9,
  config = 10,
  missing = 11,
  internal = 99,
};

class error : public std::runtime_error {
public:
  error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

} // namespace hostscope
