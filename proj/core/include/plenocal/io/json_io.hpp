#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "plenocal/mia/grid.hpp"
#include "plenocal/model/intrinsics.hpp"

namespace plenocal {

using Json = nlohmann::ordered_json;

/// Parses a JSON document from disk. Throws Error(Io) on missing or
/// malformed files.
Json load_json(const std::filesystem::path& path);

/// Writes a JSON document with stable formatting (2-space indent, trailing
/// newline, shortest round-trip doubles) so identical content is
/// byte-identical on disk.
void save_json(const std::filesystem::path& path, const Json& doc);

Json intrinsics_to_json(const CameraIntrinsics& intr);
CameraIntrinsics intrinsics_from_json(const Json& doc);

void save_intrinsics(const std::filesystem::path& path, const CameraIntrinsics& intr);
CameraIntrinsics load_intrinsics(const std::filesystem::path& path);

Json mia_grid_to_json(const MiaGrid& grid);
MiaGrid mia_grid_from_json(const Json& doc);

void save_mia_grid(const std::filesystem::path& path, const MiaGrid& grid);
MiaGrid load_mia_grid(const std::filesystem::path& path);

}  // namespace plenocal
