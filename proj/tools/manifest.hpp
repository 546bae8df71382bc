#pragma once

#include <filesystem>
#include <string>

#include "vru/config.hpp"
#include "vru/pipeline.hpp"

namespace vru::tools {

// Hex SHA-256 of a file's contents.
std::string sha256_file(const std::filesystem::path& path);

// manifest_<command>.json in the output directory; returns its path.
std::filesystem::path write_manifest(const RunConfig& config, const CommandResult& result);

}  // namespace vru::tools
