// Copyright 2026 The trmac-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace trmac {

using Complex = std::complex<double>;
using NodeId = std::uint32_t;

/// Raised when a caller-supplied value violates a documented precondition.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised by scenario loading and validation. The message names the offending
/// field or invariant.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised by text parsers; carries the 1-based line number of the failure.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Directed link between two nodes.
struct LinkId {
    NodeId tx = 0;
    NodeId rx = 0;

    friend bool operator==(const LinkId&, const LinkId&) = default;
    friend auto operator<=>(const LinkId&, const LinkId&) = default;
};

}  // namespace trmac
