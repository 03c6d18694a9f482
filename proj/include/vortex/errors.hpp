#pragma once

#include <stdexcept>

namespace vortex {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidBeamError : Error { using Error::Error; };       // BeamSpec invariant violated
struct UnsupportedModeError : Error { using Error::Error; };   // radial index p != 0
struct NoRingError : Error { using Error::Error; };            // ell == 0 where a ring is required
struct ResonanceError : Error { using Error::Error; };         // detuning == 0
struct UndersampledGridError : Error { using Error::Error; };  // pitch/extent rule violated
struct ApertureOverflowError : Error { using Error::Error; };  // beam would hit the grid boundary
struct GeometryMismatchError : Error { using Error::Error; };  // grids of different n/pitch/z
struct QuadratureToleranceError : Error { using Error::Error; };
struct SamplingError : Error { using Error::Error; };          // decomposition basis undersampled
struct RankDeficientError : Error { using Error::Error; };
struct LowContrastError : Error { using Error::Error; };       // fringe pattern washed out
struct NumericError : Error { using Error::Error; };           // internal consistency check failed
struct ValidationError : Error { using Error::Error; };        // bad config / CLI input

} // namespace vortex
