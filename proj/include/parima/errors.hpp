// Copyright (c) 2026 the parima authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#pragma once

#include <stdexcept>

namespace parima {

/// Base class for all errors thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input is degenerate for the requested operation (e.g. zero-length vector).
struct DegenerateInput : Error {
    using Error::Error;
};

/// A pixel coordinate lies outside the frame bounds.
struct OutOfFrame : Error {
    using Error::Error;
};

/// Quaternion norm is too far from 1 to be trusted.
struct InvalidQuaternion : Error {
    using Error::Error;
};

/// Malformed or inconsistent input data.
struct InvalidInput : Error {
    using Error::Error;
};

/// Not enough observations for the requested fit or warm-up.
struct InsufficientData : Error {
    using Error::Error;
};

/// An operation was invoked in a state that cannot support it.
struct InvalidState : Error {
    using Error::Error;
};

} // namespace parima
