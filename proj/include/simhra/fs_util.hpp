#pragma once

#include <filesystem>
#include <string>

namespace simhra {

std::string read_text_file(const std::filesystem::path& path);

// Writes to a temp file in the same directory, then renames into place.
void write_text_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace simhra
