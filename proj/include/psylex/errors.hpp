#pragma once

#include <stdexcept>
#include <string>

namespace psylex {

// Invalid input data: bad values, broken invariants, missing files.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Structurally malformed input; message names the offending line where known.
class ParseError : public ValidationError {
public:
    explicit ParseError(const std::string& what) : ValidationError(what) {}
};

}  // namespace psylex
