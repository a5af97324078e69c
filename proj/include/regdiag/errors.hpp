#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace regdiag {

/// Malformed CSV input. `row()` is the 1-based record number (header = 1).
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t row, const std::string& what)
        : std::runtime_error("row " + std::to_string(row) + ": " + what), row_(row) {}
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// Invalid or incomplete configuration. `key()` names the offending key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error(what), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// A diagnosis that ran but could not reach a classification, e.g. "no_overlap"
/// from matching or "non_comparable_populations" from the workflow.
class DiagnosisError : public std::runtime_error {
public:
    DiagnosisError(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

/// Invalid synthetic scenario specification.
class SpecError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Control/treatment window selection produced an empty side.
class WindowError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace regdiag
