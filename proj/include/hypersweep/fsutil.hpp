#pragma once
// Small file helpers shared by the CLI and the pipeline stages.

#include <filesystem>
#include <string>
#include <string_view>

namespace hypersweep {

std::string read_file(const std::filesystem::path& path);

// Write-temp-then-rename so readers never observe a half-written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace hypersweep
