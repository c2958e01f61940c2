#pragma once

#include <stdexcept>
#include <string>

namespace hicu {

/// Base class of every error raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShapeError : Error { using Error::Error; };
struct RankError : Error { using Error::Error; };
struct SketchError : Error { using Error::Error; };
struct ParameterError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct SizeError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct FormatError : Error { using Error::Error; };

/// Input is numerically degenerate (zero signal, rank-deficient basis).
struct DegenerateInputError : Error { using Error::Error; };

/// Line search direction is annihilated by every kernel; no step is defined.
struct DegenerateDirectionError : Error { using Error::Error; };

} // namespace hicu
