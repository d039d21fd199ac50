#pragma once

#include <stdexcept>
#include <string>

namespace irg {

// Invalid argument or malformed input (CLI maps this to exit code 1).
struct input_error : std::invalid_argument {
    explicit input_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Work refused by a size/budget guard (CLI maps this to exit code 2).
struct resource_error : std::runtime_error {
    explicit resource_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace irg
