#pragma once

#include <stdexcept>
#include <string>

namespace assouad {

/// A constructive procedure could not satisfy one of its constraints.
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A materialization cap (levels, cylinders, points) would be exceeded.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A query falls outside the materialized range of a schedule or growth function.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Malformed serialized input.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace assouad
