#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mapek {

using Tick = std::uint64_t;

/// Every failure surfaced by the library carries a stable kebab-case code
/// (e.g. "unresolved-ref", "bad-checksum") plus an optional location.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message, std::string where = {})
        : std::runtime_error(message), code_(std::move(code)), where_(std::move(where)) {}

    const std::string& code() const noexcept { return code_; }
    const std::string& where() const noexcept { return where_; }

private:
    std::string code_;
    std::string where_;
};

}  // namespace mapek
