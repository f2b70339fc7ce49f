// Small I/O helpers: number formatting, file access, content hashing.
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace opsim {

// Shortest representation that round-trips to the same double.
std::string format_double(double value);

// Fixed-point with `digits` decimals, for human-facing summary columns.
std::string format_fixed(double value, int digits);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

// SHA-1 over "blob <size>\0<content>", as `git hash-object` computes it.
std::string git_blob_hash(std::string_view content);

}  // namespace opsim
