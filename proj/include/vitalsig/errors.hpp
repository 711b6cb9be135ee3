#pragma once

#include <stdexcept>
#include <string>

namespace vitalsig {

enum class ErrorCode {
    // dataio
    MalformedRow,
    InconsistentPatchLength,
    NonPositiveFps,
    DuplicatePatch,
    DuplicateRoi,
    NonMonotoneTime,
    IrregularSampling,
    EmptyTrace,
    MalformedManifest,
    BadLabel,
    FileNotFound,
    // synthgen
    InvalidSpec,
    InvalidRr,
    // rppg
    TooShort,
    ZeroFps,
    ConstantChannel,
    NoPulse,
    AllRemoved,
    MissingPerPatch,
    // hrv
    EmptySeries,
    TooFewIntervals,
    DegenerateTachogram,
    SegmentOutOfRange,
    // ecgref
    NoBeatsDetected,
    SamplingTooLow,
    InsufficientPairs,
    // stats
    ConstantInput,
    LengthMismatch,
    ZeroVariance,
    // ml
    MissingModality,
    SingleClass,
    NoConvergence,
    TooFewSamples,
    MissingOutOfFold,
    // thermal
    MissingForehead,
    // attribution
    TooManyFeatures,
    EmptyBackground,
    // generic
    InvalidArgument,
    IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace vitalsig
