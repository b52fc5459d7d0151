#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "remake/replay.hpp"

namespace remake {

// Converts one MultiWOZ 2.2 dialogue (schema-guided layout with frames) into
// the annotated form replay consumes. `acts` is the dialogue's entry in
// dialog_acts.json, or null when the acts file is unavailable.
AnnotatedDialogue adapt_multiwoz22_dialogue(const nlohmann::json& dialogue, const nlohmann::json& acts);

// Reads train/, dev/ and test/ dialogues_*.json under `root` (any that exist)
// plus root/dialog_acts.json when present. Output is ordered by dialogue id.
std::vector<AnnotatedDialogue> load_multiwoz22(const std::filesystem::path& root);

}  // namespace remake
