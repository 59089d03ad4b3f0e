#pragma once

#include <stdexcept>
#include <string>

namespace dqsim {

// Bad scenario file or parameter set. CLI exit code 1.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Simulation blew past the divergence guard. CLI exit code 2.
struct DivergenceError : std::runtime_error {
    explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem trouble while reading inputs or writing results. CLI exit code 3.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dqsim
