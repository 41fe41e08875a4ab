#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace msr {

// Root of every error the core library throws. The CLI maps each subclass to
// a documented exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument or precondition violation.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Malformed file header or container field.
class FormatError : public Error {
 public:
  FormatError(const std::string& field, const std::string& what)
      : Error("format error in " + field + ": " + what), field_(field) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Corrupt or truncated entropy-coded payload.
class DecodeError : public Error {
 public:
  DecodeError(std::size_t offset, const std::string& what)
      : Error("decode error at byte " + std::to_string(offset) + ": " + what),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Unknown reconstructor id.
class RegistryError : public Error {
 public:
  using Error::Error;
};

// Two R-D curves share no interval on the compared axis.
class NoOverlapError : public Error {
 public:
  using Error::Error;
};

// Two independent computations of the same quantity disagreed.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace msr
