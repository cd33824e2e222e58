#pragma once

#include <stdexcept>
#include <string>

namespace culturefms {

/// Raised when a caller breaks a documented precondition.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Invalid or unreadable configuration. Carries the offending key and the
/// 1-based source line (0 when the value did not come from a file).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, std::size_t line, const std::string& message)
      : std::runtime_error(format(key, line, message)), key_(std::move(key)), line_(line) {}

  const std::string& key() const noexcept { return key_; }
  std::size_t line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& key, std::size_t line, const std::string& message) {
    std::string out;
    if (line > 0) out += "line " + std::to_string(line) + ": ";
    if (!key.empty()) out += "`" + key + "`: ";
    return out + message;
  }

  std::string key_;
  std::size_t line_;
};

class RenderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace culturefms
