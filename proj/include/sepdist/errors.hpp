#pragma once

#include <stdexcept>
#include <string>

namespace sepdist {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotHermitianError : Error { using Error::Error; };
struct BadIndexError : Error { using Error::Error; };
struct BadPartitionError : Error { using Error::Error; };
struct DimMismatchError : Error { using Error::Error; };
struct BadEpsilonError : Error { using Error::Error; };
struct BadAlphaError : Error { using Error::Error; };
struct BadModeError : Error { using Error::Error; };
struct NotOrthogonalError : Error { using Error::Error; };
struct InvalidStateError : Error { using Error::Error; };
// run_protocol throws this when an evolved state disagrees with its
// independently constructed reference matrix.
struct InternalCheckError : Error { using Error::Error; };

}  // namespace sepdist
