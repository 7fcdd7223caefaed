#ifndef SRDA_ERROR_HPP
#define SRDA_ERROR_HPP

#include <stdexcept>
#include <string>

namespace srda {

/// Base class for every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeError : Error { using Error::Error; };
struct InvalidInput : Error { using Error::Error; };
struct ZeroNorm : Error { using Error::Error; };
struct FlatGradient : Error { using Error::Error; };
struct DivergedError : Error { using Error::Error; };
struct InvalidLabel : Error { using Error::Error; };
struct InvalidCount : Error { using Error::Error; };
struct NonPlanarData : Error { using Error::Error; };
struct UnlabeledData : Error { using Error::Error; };
struct InsufficientData : Error { using Error::Error; };
struct BadMagic : Error { using Error::Error; };
struct TruncatedPayload : Error { using Error::Error; };
struct UnsupportedType : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct InternalError : Error { using Error::Error; };

} // namespace srda

#endif
