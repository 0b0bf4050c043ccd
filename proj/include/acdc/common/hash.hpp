#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace acdc {

std::uint64_t fnv1a64(std::string_view bytes) noexcept;

// Hex FNV-1a digest of a file's bytes; throws IoError when unreadable.
std::string file_digest(const std::filesystem::path& path);

}  // namespace acdc
