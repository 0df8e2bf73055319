#pragma once

#include <stdexcept>
#include <string>

namespace obw {

struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SlopeError : std::runtime_error {
  explicit SlopeError(const std::string& msg) : std::runtime_error(msg) {}
};

struct MassLossError : std::runtime_error {
  explicit MassLossError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NotCoupledError : std::runtime_error {
  explicit NotCoupledError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DegenerateError : std::runtime_error {
  explicit DegenerateError(const std::string& msg) : std::runtime_error(msg) {}
};

struct InsufficientData : std::runtime_error {
  explicit InsufficientData(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace obw
