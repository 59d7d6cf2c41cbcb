#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace ahpa {

inline constexpr const char* kVersion = "0.1.0";

/// Entry point behind the `ahpa` binary. Returns 0 on success, 1 on usage
/// errors and 2 when the engine reports an EngineError.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Writes via a temporary sibling file and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

} // namespace ahpa
