#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sphereldp {

// Iterative method failed to converge or produced an inconsistent state.
struct numeric_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct parse_error : std::runtime_error {
  parse_error(const std::string& source, std::size_t line, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line(line) {}
  std::size_t line;
};

}  // namespace sphereldp
