#include "amf/error.hpp"

namespace amf {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::DegenerateRate: return "DegenerateRate";
        case ErrorCode::TotalLossUnsupported: return "TotalLossUnsupported";
        case ErrorCode::TooShort: return "TooShort";
        case ErrorCode::Validation: return "Validation";
        case ErrorCode::RankDeficient: return "RankDeficient";
        case ErrorCode::Underdetermined: return "Underdetermined";
        case ErrorCode::NotNested: return "NotNested";
        case ErrorCode::PerfectFitDegenerate: return "PerfectFitDegenerate";
        case ErrorCode::ConstantActuals: return "ConstantActuals";
        case ErrorCode::InvalidPValue: return "InvalidPValue";
        case ErrorCode::ConstantColumn: return "ConstantColumn";
        case ErrorCode::MaxIterations: return "MaxIterations";
        case ErrorCode::TooFewObservations: return "TooFewObservations";
        case ErrorCode::EmptyPath: return "EmptyPath";
        case ErrorCode::DegenerateSeries: return "DegenerateSeries";
        case ErrorCode::InsufficientOverlap: return "InsufficientOverlap";
        case ErrorCode::InvalidDistance: return "InvalidDistance";
        case ErrorCode::DegenerateMarket: return "DegenerateMarket";
        case ErrorCode::MissingFactor: return "MissingFactor";
        case ErrorCode::ReduceBasis: return "ReduceBasis";
        case ErrorCode::MissingFuture: return "MissingFuture";
        case ErrorCode::InvalidCovariance: return "InvalidCovariance";
    }
    return "Unknown";
}

bool Error::is_numerical() const noexcept {
    switch (code_) {
        case ErrorCode::RankDeficient:
        case ErrorCode::PerfectFitDegenerate:
        case ErrorCode::ConstantColumn:
        case ErrorCode::MaxIterations:
        case ErrorCode::DegenerateSeries:
        case ErrorCode::DegenerateMarket:
        case ErrorCode::ReduceBasis:
        case ErrorCode::InvalidCovariance:
            return true;
        default:
            return false;
    }
}

}  // namespace amf
