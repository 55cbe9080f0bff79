#pragma once
#include <stdexcept>
#include <string>

namespace adveig {

// All failure modes carry a stable machine-readable kind ("IllegalCharacter",
// "BadGridSpec", "NoConvergence", ...) next to the human message.
class Error : public std::runtime_error {
  public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

  private:
    std::string kind_;
};

[[noreturn]] inline void raise(std::string kind, const std::string& message) {
    throw Error(std::move(kind), message);
}

}  // namespace adveig
