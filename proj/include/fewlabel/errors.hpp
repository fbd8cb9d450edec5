#pragma once

#include <stdexcept>
#include <string>

namespace fewlabel {

// Bad inputs, malformed files, contract violations. Mapped to exit code 2 by the CLI.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite losses and other numeric breakdowns. Mapped to exit code 3 by the CLI.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace fewlabel
