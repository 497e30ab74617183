#include "rolefinder/diagnostics.hpp"

#include <iostream>
#include <mutex>
#include <vector>

namespace rolefinder {
namespace {

std::mutex& handler_mutex() {
  static std::mutex m;
  return m;
}

WarningHandler& current_handler() {
  static WarningHandler h;
  return h;
}

}  // namespace

void warn(const std::string& message) {
  std::lock_guard lock(handler_mutex());
  if (auto& h = current_handler()) {
    h(message);
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

WarningHandler set_warning_handler(WarningHandler handler) {
  std::lock_guard lock(handler_mutex());
  auto previous = std::move(current_handler());
  current_handler() = std::move(handler);
  return previous;
}

ScopedWarningCapture::ScopedWarningCapture() {
  previous_ = set_warning_handler([this](const std::string& m) { messages_.push_back(m); });
}

ScopedWarningCapture::~ScopedWarningCapture() { set_warning_handler(std::move(previous_)); }

bool ScopedWarningCapture::contains(const std::string& fragment) const {
  for (const auto& m : messages_) {
    if (m.find(fragment) != std::string::npos) return true;
  }
  return false;
}

}  // namespace rolefinder
