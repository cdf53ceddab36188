#pragma once

#include <stdexcept>
#include <string>

namespace polylab {

// Thrown when a requested computation is declined up front (path-count or
// time/memory budget exceeded, degenerate statistical input). CLI maps this
// to exit code 3.
struct refusal_error : std::runtime_error {
    explicit refusal_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an iterative numeric routine fails to reach its tolerance.
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an operation is asked for a distribution or mode outside the
// set it supports. A usage error; the CLI maps it, like any other invalid
// argument, to exit code 2.
struct unsupported_error : std::invalid_argument {
    explicit unsupported_error(const std::string& what) : std::invalid_argument(what) {}
};

} // namespace polylab
