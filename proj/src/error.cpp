#include "advgame/error.hpp"

namespace advgame {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::BadDistribution: return "BadDistribution";
        case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
        case ErrorKind::EmptyVectorSet: return "EmptyVectorSet";
        case ErrorKind::BadPrior: return "BadPrior";
        case ErrorKind::BadGameFile: return "BadGameFile";
        case ErrorKind::TypeOutOfRange: return "TypeOutOfRange";
        case ErrorKind::ProfileOutOfBox: return "ProfileOutOfBox";
        case ErrorKind::SolverFailure: return "SolverFailure";
        case ErrorKind::GridTooLarge: return "GridTooLarge";
        case ErrorKind::BadLabel: return "BadLabel";
        case ErrorKind::MissingFeature: return "MissingFeature";
        case ErrorKind::MissingColumn: return "MissingColumn";
        case ErrorKind::FileError: return "FileError";
        case ErrorKind::KTooLarge: return "KTooLarge";
        case ErrorKind::VectorSetTooLarge: return "VectorSetTooLarge";
        case ErrorKind::ZeroDenominator: return "ZeroDenominator";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

namespace {

std::string join_issues(const std::vector<ValidationIssue>& issues) {
    std::string out = "invalid game";
    for (const auto& issue : issues) {
        out += "\n  - ";
        out += to_string(issue.kind);
        out += ": ";
        out += issue.message;
    }
    return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<ValidationIssue> issues)
    : Error(issues.empty() ? ErrorKind::InvalidArgument : issues.front().kind, join_issues(issues)),
      issues_(std::move(issues)) {}

}  // namespace advgame
