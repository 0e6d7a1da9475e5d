#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace bmq {

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);
std::string sha256_file_hex(const std::filesystem::path& path);

/// Writes atomically: temp file in the same directory, then rename.
void atomic_write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace bmq
