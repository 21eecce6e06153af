#pragma once

#include <stdexcept>
#include <string>

namespace lpcascade {

/// Bad caller input: malformed files, dimension mismatches, invalid parameters.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// An internal guarantee did not hold (e.g. the cascade disagreed with the oracle).
class InvariantError : public std::logic_error {
 public:
  explicit InvariantError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace lpcascade
