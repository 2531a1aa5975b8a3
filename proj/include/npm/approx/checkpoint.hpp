#pragma once

#include <filesystem>
#include <optional>

#include <json.hpp>

#include "npm/approx/adam.hpp"
#include "npm/approx/mlp.hpp"

namespace npm::approx {

inline constexpr int kCheckpointFormatVersion = 1;

/// Versioned JSON form of a network, optionally with its optimizer state.
/// Doubles are written in shortest round-trip form, so save/load is bit-exact.
nlohmann::json to_json(const Mlp& net, const AdamState* optimizer = nullptr);
Mlp mlp_from_json(const nlohmann::json& doc);
/// Restores optimizer state saved by `to_json`, if present.
std::optional<AdamState> adam_from_json(const nlohmann::json& doc, const Mlp& net);

void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace npm::approx
