#pragma once

#include <cstdint>
#include <string_view>

namespace gazepriv {

enum class MovementLabel : std::uint8_t { kUnknown = 0, kFixation = 1, kSaccade = 2 };

constexpr std::string_view to_string(MovementLabel label) {
  switch (label) {
    case MovementLabel::kFixation: return "FIXATION";
    case MovementLabel::kSaccade: return "SACCADE";
    case MovementLabel::kUnknown: break;
  }
  return "UNKNOWN";
}

}  // namespace gazepriv
