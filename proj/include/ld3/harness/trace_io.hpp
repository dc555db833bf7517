#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "ld3/harness/scenario.hpp"

namespace ld3 {

/// Column names of the per-step trace CSV, in order.
std::span<const std::string_view> trace_columns();

/// Values are written in shortest round-trip form, so read(write(rows)) is
/// exact. Absent sensor values are written as "nan".
void write_trace(std::ostream& out, std::span<const TraceRow> rows);
void write_trace(const std::filesystem::path& path, std::span<const TraceRow> rows);

/// Throws ParseError (line number of the offending row) on a header that
/// differs from trace_columns(), a wrong field count or a bad value.
std::vector<TraceRow> read_trace(std::istream& in);
std::vector<TraceRow> read_trace(const std::filesystem::path& path);

}  // namespace ld3
