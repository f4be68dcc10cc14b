#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace specsense {

/// Precondition violated by a caller-supplied argument or configuration.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Filesystem or stream failure. The message carries the path.
class IoError : public std::runtime_error {
 public:
  IoError(const std::string& path, const std::string& what);
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Malformed on-disk data. `offset` is the byte position where parsing failed.
class FormatError : public std::runtime_error {
 public:
  enum class Kind { BadMagic, UnknownVersion, Truncated, BadHeader, Checksum, Schema };

  FormatError(Kind kind, std::uint64_t offset, const std::string& what);
  Kind kind() const noexcept { return kind_; }
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  Kind kind_;
  std::uint64_t offset_;
};

/// Training produced a non-finite loss.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws InvalidArgument with `msg` when `cond` is false.
inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidArgument(msg);
}

}  // namespace specsense
