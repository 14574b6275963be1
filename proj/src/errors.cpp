#include "bracket/errors.hpp"

namespace bracket {

std::string_view to_string(Errc code) {
    switch (code) {
        case Errc::MissingData: return "MissingData";
        case Errc::MissingSE: return "MissingSE";
        case Errc::NonpositiveDenominator: return "NonpositiveDenominator";
        case Errc::OutOfDomain: return "OutOfDomain";
        case Errc::LevelMismatch: return "LevelMismatch";
        case Errc::EmptyBracket: return "EmptyBracket";
        case Errc::EmptyGroup: return "EmptyGroup";
        case Errc::BadSplit: return "BadSplit";
        case Errc::ArmUnavailable: return "ArmUnavailable";
        case Errc::InvalidScenario: return "InvalidScenario";
        case Errc::InvalidPanel: return "InvalidPanel";
        case Errc::FileNotFound: return "FileNotFound";
        case Errc::ParseError: return "ParseError";
        case Errc::SchemaError: return "SchemaError";
        case Errc::IoError: return "IoError";
        case Errc::ConfigError: return "ConfigError";
        case Errc::InvariantViolation: return "InvariantViolation";
    }
    return "Unknown";
}

ErrorCategory category(Errc code) {
    switch (code) {
        case Errc::ConfigError:
        case Errc::OutOfDomain:
        case Errc::LevelMismatch:
        case Errc::BadSplit:
        case Errc::InvalidScenario:
        case Errc::ArmUnavailable:
            return ErrorCategory::Config;
        case Errc::InvariantViolation:
            return ErrorCategory::Internal;
        default:
            return ErrorCategory::Data;
    }
}

}  // namespace bracket
