#pragma once

#include <stdexcept>
#include <string>

namespace rlseg {

// Base error carrying a machine-readable category, printed by the CLI as
// "error: <category>: <message>" on stderr.
class Error : public std::runtime_error {
public:
    Error(std::string category, const std::string& message)
        : std::runtime_error(message), category_(std::move(category)) {}
    const std::string& category() const { return category_; }

private:
    std::string category_;
};

// Invalid configuration or API usage (bad weights, missing GT, bad CLI args).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error("config", msg) {}
};

// Structural mismatch: grid/tensor shapes, layer wiring.
class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& msg) : Error("shape", msg) {}
};

// A level-set region collapsed (denominator of a region average ~ 0).
class DegenerateRegionError : public Error {
public:
    explicit DegenerateRegionError(const std::string& msg) : Error("degenerate_region", msg) {}
};

// Metric has an empty denominator (e.g. both masks empty for Dice).
class UndefinedMetricError : public Error {
public:
    explicit UndefinedMetricError(const std::string& msg) : Error("undefined_metric", msg) {}
};

// Malformed file content; byte_offset points at the offending position.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t byte_offset)
        : Error("parse", msg + " (byte " + std::to_string(byte_offset) + ")"),
          byte_offset_(byte_offset) {}
    std::size_t byte_offset() const { return byte_offset_; }

private:
    std::size_t byte_offset_;
};

// Filesystem-level failure.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error("io", msg) {}
};

} // namespace rlseg
