#pragma once

#include <functional>
#include <string>
#include <vector>

namespace rolefinder {

using WarningHandler = std::function<void(const std::string&)>;

// Emits a non-fatal warning. The default handler writes "warning: <msg>" to stderr.
void warn(const std::string& message);

// Installs a handler and returns the previous one. Passing an empty function
// restores the default.
WarningHandler set_warning_handler(WarningHandler handler);

// Captures every warning emitted during its lifetime (tests, CLI summaries).
class ScopedWarningCapture {
 public:
  ScopedWarningCapture();
  ~ScopedWarningCapture();
  ScopedWarningCapture(const ScopedWarningCapture&) = delete;
  ScopedWarningCapture& operator=(const ScopedWarningCapture&) = delete;

  const std::vector<std::string>& messages() const { return messages_; }
  bool contains(const std::string& fragment) const;

 private:
  std::vector<std::string> messages_;
  WarningHandler previous_;
};

}  // namespace rolefinder
