#pragma once

#include <string>

#include <json.hpp>

#include "klucb/exp_family.hpp"

namespace klucb {

// Family files are JSON: either {"states": [...], "P": [[...]], "f": [...]}
// or the shorthand {"two_state": {"p": 0.49, "q": 0.45}}, which expands to
// the two-state chain with rewards (-1, +1).
FamilySpec family_from_json(const nlohmann::json& j);

FamilySpec load_family_file(const std::string& path);

nlohmann::json family_to_json(const FamilySpec& fam);

}  // namespace klucb
