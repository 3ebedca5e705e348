#pragma once

#include <stdexcept>
#include <string>

namespace pca {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad input or precondition violation (CLI exit code 2).
struct ConfigError : Error {
    using Error::Error;
};

// Exceeded an explicit state/term budget (CLI exit code 4).
struct ResourceError : Error {
    using Error::Error;
};

}  // namespace pca
