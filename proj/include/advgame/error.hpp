#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace advgame {

enum class ErrorKind {
    BadDistribution,
    DegenerateDenominator,
    EmptyVectorSet,
    BadPrior,
    BadGameFile,
    TypeOutOfRange,
    ProfileOutOfBox,
    SolverFailure,
    GridTooLarge,
    BadLabel,
    MissingFeature,
    MissingColumn,
    FileError,
    KTooLarge,
    VectorSetTooLarge,
    ZeroDenominator,
    InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct ValidationIssue {
    ErrorKind kind;
    std::string message;
};

/// Thrown by validate_game; carries every problem found, not just the first.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<ValidationIssue> issues);

    const std::vector<ValidationIssue>& issues() const noexcept { return issues_; }

private:
    std::vector<ValidationIssue> issues_;
};

}  // namespace advgame
