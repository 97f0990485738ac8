#pragma once

#include <stdexcept>
#include <string>

namespace principal {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// geometry_core
class RegularityError : public Error { using Error::Error; };
class CriticalPointError : public Error { using Error::Error; };
class UmbilicReferenceError : public Error { using Error::Error; };

// umbilics
class FrameError : public Error { using Error::Error; };
class ConvergenceError : public Error { using Error::Error; };

// cycles
class ReturnFailure : public Error { using Error::Error; };
class UmbilicProximityError : public Error { using Error::Error; };

// catalog
class ParamError : public Error { using Error::Error; };
class DegenerateRoots : public Error { using Error::Error; };
class TransversalityError : public Error { using Error::Error; };

}  // namespace principal
