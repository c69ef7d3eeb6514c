#pragma once

#include <stdexcept>
#include <string>

namespace affmon {

// All failures carry a stable machine-readable name ("NegativeEntry",
// "CapExceeded", ...) next to the human-readable message. The CLI echoes
// the name in error reports and tests match on it.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& message)
        : std::runtime_error(message), name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

} // namespace affmon
