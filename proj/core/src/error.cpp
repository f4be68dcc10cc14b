#include "specsense/error.hpp"

namespace specsense {

IoError::IoError(const std::string& path, const std::string& what)
    : std::runtime_error(path + ": " + what), path_(path) {}

FormatError::FormatError(Kind kind, std::uint64_t offset, const std::string& what)
    : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"),
      kind_(kind),
      offset_(offset) {}

}  // namespace specsense
