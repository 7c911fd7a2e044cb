#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace qwloc {

// Shortest round-trip decimal form, locale-independent.
std::string format_double(double v);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

struct PathCollisionError : std::runtime_error {
  explicit PathCollisionError(const std::string& path);
};

// Writes `body` to `path`, creating parent directories. Refuses to replace
// an existing file unless `overwrite` is set.
void write_file_checked(const std::filesystem::path& path,
                        std::string_view body, bool overwrite);

}  // namespace qwloc
