#pragma once

// Deterministic report serialization.

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace bohr {

using Json = nlohmann::json;

/// Keys sorted, no whitespace beyond a trailing newline, floating-point
/// numbers printed with 17 significant digits. Throws std::domain_error
/// on NaN or infinity.
std::string canonical_json(const Json& value);

/// %.17g, rejecting non-finite input.
std::string format_double(double x);

/// Git blob id: SHA-1 of "blob <size>\0" followed by the content.
std::string git_blob_sha1(std::string_view content);

/// RFC 4180: fields with commas, quotes or line breaks are quoted and
/// quotes doubled; records end in CRLF.
std::string csv_field(std::string_view field);
std::string csv_record(const std::vector<std::string>& fields);

/// Writes to a temporary file in the same directory and renames it over
/// `path`. Throws std::runtime_error when the path is not writable.
void write_atomic(const std::string& path, std::string_view content);

}  // namespace bohr
