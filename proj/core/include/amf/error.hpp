#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace amf {

enum class ErrorCode {
    InvalidArgument,
    DegenerateRate,
    TotalLossUnsupported,
    TooShort,
    Validation,
    RankDeficient,
    Underdetermined,
    NotNested,
    PerfectFitDegenerate,
    ConstantActuals,
    InvalidPValue,
    ConstantColumn,
    MaxIterations,
    TooFewObservations,
    EmptyPath,
    DegenerateSeries,
    InsufficientOverlap,
    InvalidDistance,
    DegenerateMarket,
    MissingFactor,
    ReduceBasis,
    MissingFuture,
    InvalidCovariance,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by the library. The code lets
/// callers (the CLI in particular) map failures to exit statuses without
/// parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    /// True for failures of the numerics rather than of the inputs.
    bool is_numerical() const noexcept;

private:
    ErrorCode code_;
};

/// Raised when a design matrix has a column linearly dependent on the
/// columns before it.
class RankDeficientError : public Error {
public:
    RankDeficientError(long column, const std::string& what)
        : Error(ErrorCode::RankDeficient, what), column_(column) {}

    long column() const noexcept { return column_; }

private:
    long column_;
};

}  // namespace amf
