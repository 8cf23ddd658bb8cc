#pragma once

#include <stdexcept>
#include <string>

namespace voz {

// Data or usage error: bad file, bad flag value, malformed input.
// The CLI maps these to exit code 1; anything else that escapes a
// subcommand is treated as an internal error (exit code 2).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

}  // namespace voz
