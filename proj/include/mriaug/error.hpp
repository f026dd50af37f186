#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mriaug {

enum class ErrorCode {
    NonInvertibleAffine,
    ObliqueAffine,
    ConstantVolume,
    NonFiniteData,
    ShapeMismatch,
    BadShape,
    BadMagic,
    BadSize,
    UnsupportedVersion,
    UnsupportedDatatype,
    UnsupportedDimensionality,
    TruncatedFile,
    GzipError,
    IoError,
    LossyDatatype,
    BadConfig,
    BadLevel,
    BadTransformId,
    NegativeSigma,
    NotRasOriented,
    NotNormalized,
    BadCutoff,
    BadN,
    BadFactor,
    PlanShapeMismatch,
    BadPlan,
    BadSliceIndex,
    SpecOutOfBounds,
    BadLabel,
    Internal,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::NonInvertibleAffine: return "NonInvertibleAffine";
    case ErrorCode::ObliqueAffine: return "ObliqueAffine";
    case ErrorCode::ConstantVolume: return "ConstantVolume";
    case ErrorCode::NonFiniteData: return "NonFiniteData";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::BadShape: return "BadShape";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::BadSize: return "BadSize";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::UnsupportedDatatype: return "UnsupportedDatatype";
    case ErrorCode::UnsupportedDimensionality: return "UnsupportedDimensionality";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::GzipError: return "GzipError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::LossyDatatype: return "LossyDatatype";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::BadLevel: return "BadLevel";
    case ErrorCode::BadTransformId: return "BadTransformId";
    case ErrorCode::NegativeSigma: return "NegativeSigma";
    case ErrorCode::NotRasOriented: return "NotRasOriented";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::BadCutoff: return "BadCutoff";
    case ErrorCode::BadN: return "BadN";
    case ErrorCode::BadFactor: return "BadFactor";
    case ErrorCode::PlanShapeMismatch: return "PlanShapeMismatch";
    case ErrorCode::BadPlan: return "BadPlan";
    case ErrorCode::BadSliceIndex: return "BadSliceIndex";
    case ErrorCode::SpecOutOfBounds: return "SpecOutOfBounds";
    case ErrorCode::BadLabel: return "BadLabel";
    case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

/// Every failure in the library surfaces as this exception; code() is stable,
/// what() is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace mriaug
