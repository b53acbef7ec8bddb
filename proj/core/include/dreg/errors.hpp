// Copyright the dreg authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <stdexcept>
#include <string>

namespace dreg {

/// File or stream level failure: missing file, bad magic, truncated payload, unwritable path.
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Non-finite values produced (or encountered) by a numerical routine.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace dreg
