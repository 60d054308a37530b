#ifndef PGRID_ERROR_H_
#define PGRID_ERROR_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pgrid {

// Base class for every error raised by the library. Callers that only need a
// message can catch std::runtime_error.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed binary container. `offset` is the byte position where decoding
// failed.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"),
        reason_(what),
        offset_(offset) {}

  const std::string& reason() const { return reason_; }
  std::uint64_t offset() const { return offset_; }

 private:
  std::string reason_;
  std::uint64_t offset_;
};

// Input that is well-formed but violates a documented invariant.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what) {}
};

// Arguments whose shapes or georeferencing do not agree.
class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error(what) {}
};

}  // namespace pgrid

#endif  // PGRID_ERROR_H_
