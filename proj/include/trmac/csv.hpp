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

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace trmac::csv {

/// RFC 4180 field: quoted when it contains a comma, quote, CR or LF, with
/// embedded quotes doubled.
std::string quote(std::string_view field);

/// Shortest decimal text that reads back to the same double ("." separator,
/// locale-independent). Non-finite values become "nan", "inf", "-inf".
std::string number(double value);
std::string number(long long value);

/// A finished CSV document: column names plus rows of already formatted cells.
struct Table {
    std::string name;  ///< file stem, e.g. "sinr_vs_snr"
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row);
    /// Index of a column, throws if absent.
    std::size_t column(std::string_view name) const;
};

/// Writes "# config_hash=<hash> seed=<seed>", the header, then the rows, each
/// line ending in CRLF.
void write(std::ostream& out, const Table& table, std::string_view config_hash,
           unsigned long long seed);

}  // namespace trmac::csv
