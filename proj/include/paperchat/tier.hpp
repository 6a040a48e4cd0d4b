#pragma once

#include <optional>
#include <string_view>

namespace paperchat {

/// Assistance levels, totally ordered Entry < Intermediate < Extreme.
enum class AssistanceTier { Entry = 0, Intermediate = 1, Extreme = 2 };

std::string_view to_string(AssistanceTier tier);
std::optional<AssistanceTier> parse_tier(std::string_view name);

}  // namespace paperchat
