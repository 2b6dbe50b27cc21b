#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

namespace trialkit {

using Json = nlohmann::json;

/// Canonical text form used for every JSON document the engine emits:
/// keys sorted lexicographically (nlohmann's default object ordering),
/// 2-space indentation, LF line endings, trailing newline.
std::string canonicalDump(const Json& j);

/// Single-line form for JSONL records.
std::string compactDump(const Json& j);

std::string readFile(const std::filesystem::path& path);

/// Write-temp-then-rename so concurrent readers never observe a torn file.
void writeFileAtomic(const std::filesystem::path& path, const std::string& contents);

/// Shortest round-trip decimal form of a double (std::to_chars).
std::string formatDouble(double v);

}  // namespace trialkit
