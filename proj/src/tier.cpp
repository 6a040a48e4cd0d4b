#include "paperchat/tier.hpp"

namespace paperchat {

std::string_view to_string(AssistanceTier tier) {
  switch (tier) {
    case AssistanceTier::Entry: return "entry";
    case AssistanceTier::Intermediate: return "intermediate";
    case AssistanceTier::Extreme: return "extreme";
  }
  return "entry";
}

std::optional<AssistanceTier> parse_tier(std::string_view name) {
  if (name == "entry") return AssistanceTier::Entry;
  if (name == "intermediate") return AssistanceTier::Intermediate;
  if (name == "extreme") return AssistanceTier::Extreme;
  return std::nullopt;
}

}  // namespace paperchat
