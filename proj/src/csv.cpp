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

#include "trmac/csv.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "trmac/common.hpp"

namespace trmac::csv {

std::string quote(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

std::string number(long long value) { return std::to_string(value); }

void Table::add(std::vector<std::string> row) {
    if (row.size() != header.size())
        throw InvalidArgument("row width " + std::to_string(row.size()) + " does not match header width " +
                              std::to_string(header.size()) + " in " + name);
    rows.push_back(std::move(row));
}

std::size_t Table::column(std::string_view col) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == col) return i;
    throw InvalidArgument("no column '" + std::string(col) + "' in " + name);
}

namespace {
void write_line(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out << ',';
        out << quote(cells[i]);
    }
    out << "\r\n";
}
}  // namespace

void write(std::ostream& out, const Table& table, std::string_view config_hash,
           unsigned long long seed) {
    out << "# config_hash=" << config_hash << " seed=" << seed << "\r\n";
    write_line(out, table.header);
    for (const auto& row : table.rows) write_line(out, row);
}

}  // namespace trmac::csv
