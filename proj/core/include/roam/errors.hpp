#pragma once

#include <stdexcept>
#include <string>

namespace roam {

// Malformed input documents (OSM, GeoJSON, metadata, JSONL shards).
// Carries a 1-based line number when the source format has lines; 0 otherwise.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string msg, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + msg : msg),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Structurally valid input that violates a domain contract
// (empty network, value outside a tokenizable range, unknown node, ...).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace roam
