#pragma once

#include <stdexcept>
#include <string>

namespace camellia {

// Invalid parameters, malformed descriptors, dimension mismatches. CLI exit 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// An exact enumeration was requested beyond its stated budget. CLI exit 3.
class BudgetError : public std::runtime_error {
public:
    explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// Channel evidence inconsistent with every codeword. Can only arise from
// externally supplied outputs whose noiseless coordinates contradict the
// code; simulated transmissions never trigger it. Treated as bad input.
class EvidenceError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

}  // namespace camellia
