#pragma once

#include <stdexcept>
#include <string>

namespace r2g {

enum class ErrorKind {
  ChartMismatch,
  Pole,
  Resource,
  Parse,
  Degenerate,  // bad input geometry: involutive, class 1, n too small, ...
  NotRegular,
  Internal,
};

const char* kind_name(ErrorKind k);

// Every failure names the module that raised it and the condition that broke.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, std::string reason);

  ErrorKind kind() const { return kind_; }
  const std::string& module() const { return module_; }
  const std::string& reason() const { return reason_; }

 private:
  ErrorKind kind_;
  std::string module_;
  std::string reason_;
};

}  // namespace r2g
