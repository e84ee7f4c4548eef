#pragma once

#include <stdexcept>
#include <string>

namespace bikedet {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// video_io
struct NoFrames : Error { using Error::Error; };
struct InconsistentDimensions : Error { using Error::Error; };
struct UnsupportedDepth : Error { using Error::Error; };
struct TruncatedStream : Error { using Error::Error; };
struct UnsupportedFormat : Error { using Error::Error; };

struct ParseError : Error {
    std::size_t byte_offset;
    ParseError(const std::string& msg, std::size_t offset)
        : Error(msg + " (byte " + std::to_string(offset) + ")"), byte_offset(offset) {}
};

// configuration and pipeline wiring
struct ConfigError : Error { using Error::Error; };
struct DimensionError : Error { using Error::Error; };

// feature extraction
struct DegenerateRegion : Error { using Error::Error; };
struct InsufficientHistory : Error { using Error::Error; };
struct MissingFeature : Error { using Error::Error; };

// classifier
struct EmptyClass : Error { using Error::Error; };
struct LayoutError : Error { using Error::Error; };
struct CalibrationError : Error { using Error::Error; };

// track fusion
struct NoObservations : Error { using Error::Error; };

// evaluation
struct EvalError : Error { using Error::Error; };

}  // namespace bikedet
