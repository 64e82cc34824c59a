#pragma once

#include <filesystem>
#include <string>

#include "crm/instance_gen.hpp"

namespace crm {

/// Instance JSON:
///   {"spec": {...}, "operators": [{"weights": [...],
///     "ellipsoids": [{"A": [row-major], "b": [...], "alpha": x}]}]}
/// Field order is fixed and doubles are written in shortest round-trip form,
/// so identical instances serialize to identical bytes.
std::string instance_to_json(const FppInstance& instance);
FppInstance instance_from_json(const std::string& text);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace crm
