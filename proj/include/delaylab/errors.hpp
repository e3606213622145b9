#pragma once

#include <stdexcept>
#include <string>

namespace delaylab {

// A learner or the feedback pipe broke the interaction contract.
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class EmptyRunError : public std::invalid_argument {
 public:
  EmptyRunError() : std::invalid_argument("horizon must be at least 1") {}
};

// Configuration problem; key() names the offending key path (e.g. "delay.mean").
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key + ": " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace delaylab
