#pragma once

#include <stdexcept>
#include <string>

namespace xmodal {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- configuration / validation ----
struct InvalidConfig : Error {
    using Error::Error;
};

// ---- geometry ----
struct ZeroVector : Error {
    using Error::Error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};
struct EmptyIdentity : Error {
    using Error::Error;
};
struct IndexOutOfRange : Error {
    using Error::Error;
};

// ---- mining ----
struct DegenerateBatch : Error {
    using Error::Error;
};
struct EmptyModality : Error {
    using Error::Error;
};
struct MissingCentroid : Error {
    using Error::Error;
};
struct UnmappedIdentity : Error {
    using Error::Error;
};

// ---- model ----
struct EmptySequence : Error {
    using Error::Error;
};
struct ShapeMismatch : Error {
    using Error::Error;
};
struct InsufficientData : Error {
    using Error::Error;
};
struct NumericError : Error {
    using Error::Error;
};

// ---- clustering ----
struct TooFewPoints : Error {
    using Error::Error;
};

// ---- metrics ----
struct EmptyScores : Error {
    using Error::Error;
};
struct EmptyPartition : Error {
    using Error::Error;
};
struct BadGallerySize : Error {
    using Error::Error;
};
struct LabelMismatch : Error {
    using Error::Error;
};

// ---- data / io ----
struct IoError : Error {
    using Error::Error;
};
struct FormatError : Error {
    using Error::Error;
};
struct FormatVersionMismatch : Error {
    using Error::Error;
};
struct SchemaError : Error {
    SchemaError(const std::string& msg, long line) : Error(msg + " (line " + std::to_string(line) + ")"), line_number(line) {}
    long line_number;
};
struct InconsistentFrameDim : Error {
    using Error::Error;
};
struct TooFewIdentities : Error {
    using Error::Error;
};

}  // namespace xmodal
