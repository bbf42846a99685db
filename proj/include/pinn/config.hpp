#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pinn/trainer.hpp"

namespace pinn {

/// Parses a config document. Unknown keys anywhere in the document are
/// rejected with a diagnostic naming the key; absent keys fall back to the
/// defaults in TrainConfig.
TrainConfig parse_config_json(const std::string& text);
TrainConfig load_config_file(const std::string& path);

/// Canonical JSON rendering with every field expanded; parsing it back
/// reproduces the config exactly.
std::string config_to_json(const TrainConfig& config);

/// FNV-1a over the canonical rendering.
std::uint64_t config_hash(const TrainConfig& config);

/// Built-in presets: "forward-tutorial", "forward-small",
/// "inverse-tutorial", "table-replication".
const std::vector<std::string>& preset_names();
TrainConfig preset_config(const std::string& name);

}  // namespace pinn
