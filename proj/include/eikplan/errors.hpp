#pragma once

#include <stdexcept>
#include <string>

namespace eikplan {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct OutOfDomainError : Error { using Error::Error; };
struct RegionError : Error { using Error::Error; };
struct BuildError : Error { using Error::Error; };
struct AssemblyError : Error { using Error::Error; };
struct InitializationError : Error { using Error::Error; };
struct SimulationError : Error { using Error::Error; };
struct DivergenceError : Error { using Error::Error; };
struct ParameterError : Error { using Error::Error; };
struct InvalidCandidateError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace eikplan
