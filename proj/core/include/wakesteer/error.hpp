#pragma once

#include <stdexcept>
#include <string>

namespace wakesteer {

/// Raised when a model input falls outside the domain of the wake formulas
/// (thrust coefficient outside (0,1), non-positive turbulence, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed scenario, parameter, manifest or dataset file.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace wakesteer
