#include "vitalsig/errors.hpp"

namespace vitalsig {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::MalformedRow: return "MalformedRow";
        case ErrorCode::InconsistentPatchLength: return "InconsistentPatchLength";
        case ErrorCode::NonPositiveFps: return "NonPositiveFps";
        case ErrorCode::DuplicatePatch: return "DuplicatePatch";
        case ErrorCode::DuplicateRoi: return "DuplicateRoi";
        case ErrorCode::NonMonotoneTime: return "NonMonotoneTime";
        case ErrorCode::IrregularSampling: return "IrregularSampling";
        case ErrorCode::EmptyTrace: return "EmptyTrace";
        case ErrorCode::MalformedManifest: return "MalformedManifest";
        case ErrorCode::BadLabel: return "BadLabel";
        case ErrorCode::FileNotFound: return "FileNotFound";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::InvalidRr: return "InvalidRr";
        case ErrorCode::TooShort: return "TooShort";
        case ErrorCode::ZeroFps: return "ZeroFps";
        case ErrorCode::ConstantChannel: return "ConstantChannel";
        case ErrorCode::NoPulse: return "NoPulse";
        case ErrorCode::AllRemoved: return "AllRemoved";
        case ErrorCode::MissingPerPatch: return "MissingPerPatch";
        case ErrorCode::EmptySeries: return "EmptySeries";
        case ErrorCode::TooFewIntervals: return "TooFewIntervals";
        case ErrorCode::DegenerateTachogram: return "DegenerateTachogram";
        case ErrorCode::SegmentOutOfRange: return "SegmentOutOfRange";
        case ErrorCode::NoBeatsDetected: return "NoBeatsDetected";
        case ErrorCode::SamplingTooLow: return "SamplingTooLow";
        case ErrorCode::InsufficientPairs: return "InsufficientPairs";
        case ErrorCode::ConstantInput: return "ConstantInput";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::ZeroVariance: return "ZeroVariance";
        case ErrorCode::MissingModality: return "MissingModality";
        case ErrorCode::SingleClass: return "SingleClass";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::TooFewSamples: return "TooFewSamples";
        case ErrorCode::MissingOutOfFold: return "MissingOutOfFold";
        case ErrorCode::MissingForehead: return "MissingForehead";
        case ErrorCode::TooManyFeatures: return "TooManyFeatures";
        case ErrorCode::EmptyBackground: return "EmptyBackground";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

}  // namespace vitalsig
