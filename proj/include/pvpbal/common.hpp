#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pvpbal {

// Error hierarchy. Every failure mode named in the module contracts maps to
// one of these so callers (and the CLI) can report precise causes.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error {
    using Error::Error;
};
struct SchemaError : Error {
    using Error::Error;
};
struct SizeError : Error {
    using Error::Error;
};
struct DimensionError : Error {
    using Error::Error;
};
struct NonFiniteError : Error {
    using Error::Error;
};
struct EmptyInputError : Error {
    using Error::Error;
};
struct SchemaMismatchError : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pvpbal
