#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "gaitemo/gait.hpp"

namespace gaitemo {

enum class GaitFormat { Csv, Json };

/// Parse a gait file body. CSV files carry no id, so `id` names the result
/// (callers pass the file stem); JSON files use their own "id" field and
/// fall back to `id` when it is absent.
///
/// CSV layout:
///   fps,<float>
///   t,Root_x,Root_y,Root_z,...,RFoot_z      (any joint order)
///   <t>,<48 floats>                          (one row per frame)
///
/// JSON layout: {"id": str, "fps": num, "frames": [[48 numbers], ...]}
Gait parse_gait(std::string_view text, GaitFormat format, std::string id = {});

std::string serialize_gait(const Gait& g, GaitFormat format);

/// Format is chosen from the extension (.json, anything else is CSV).
Gait read_gait_file(const std::filesystem::path& path);
void write_gait_file(const std::filesystem::path& path, const Gait& g);

GaitFormat format_for_path(const std::filesystem::path& path);

}  // namespace gaitemo
