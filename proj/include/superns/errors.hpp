#pragma once

#include <stdexcept>
#include <string>

namespace superns {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// mismatched generator counts, arities, shapes
struct DimensionError : Error {
  using Error::Error;
};

struct NotInvertibleError : Error {
  using Error::Error;
};

// odd input where even is required, zero body under sqrt, s = 0, ...
struct DomainError : Error {
  using Error::Error;
};

// incompatible symbol tables or caps
struct SchemaError : Error {
  using Error::Error;
};

// a result would need terms outside the representable window or caps
struct TruncationError : Error {
  using Error::Error;
};

struct PoleError : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

}  // namespace superns
