#pragma once

#include <stdexcept>
#include <string>

namespace awr {

/// Failure class, used by the CLI to pick an exit code.
enum class ErrorCategory { Input, Numerical };

class Error : public std::runtime_error
{
public:
  Error(ErrorCategory category, std::string kind, const std::string& what)
    : std::runtime_error(what)
    , category_(category)
    , kind_(std::move(kind))
  {}

  ErrorCategory category() const { return category_; }
  /// Short machine-readable tag such as "degenerate-design".
  const std::string& kind() const { return kind_; }

private:
  ErrorCategory category_;
  std::string kind_;
};

inline Error
input_error(const std::string& kind, const std::string& what)
{
  return Error(ErrorCategory::Input, kind, what);
}

inline Error
numerical_error(const std::string& kind, const std::string& what)
{
  return Error(ErrorCategory::Numerical, kind, what);
}

} // namespace awr
