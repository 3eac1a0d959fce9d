#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace mlmstego {

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view data);

/// SHA-256 of a file's raw bytes. Throws io_error if unreadable.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace mlmstego
