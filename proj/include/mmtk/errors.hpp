// Copyright (c) 2026 the mmtk authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace mmtk {

// Malformed textual input (trajectory lines, keypoint documents).
// Messages carry positional context (line number / frame index / field).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed binary input (bad magic, truncation, duplicate names).
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace mmtk
