#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bracket {

// Machine-readable error classes. The CLI prints the class name and maps
// the category to an exit code.
enum class Errc {
    MissingData,
    MissingSE,
    NonpositiveDenominator,
    OutOfDomain,
    LevelMismatch,
    EmptyBracket,
    EmptyGroup,
    BadSplit,
    ArmUnavailable,
    InvalidScenario,
    InvalidPanel,
    FileNotFound,
    ParseError,
    SchemaError,
    IoError,
    ConfigError,
    InvariantViolation,
};

enum class ErrorCategory { Config, Data, Internal };

std::string_view to_string(Errc code);
ErrorCategory category(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    Errc code() const noexcept { return code_; }
    std::string_view error_class() const { return to_string(code_); }

private:
    Errc code_;
};

}  // namespace bracket
