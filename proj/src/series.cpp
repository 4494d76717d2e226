#include "acr/series.hpp"

#include <string>

#include "acr/errors.hpp"

namespace acr {

std::string_view to_string(Direction d) noexcept {
  return d == Direction::maximize ? "maximize" : "minimize";
}

Direction parse_direction(std::string_view name) {
  if (name == "maximize") return Direction::maximize;
  if (name == "minimize") return Direction::minimize;
  throw ConfigError("unknown direction '" + std::string(name) + "'");
}

std::string_view to_string(RateKind k) noexcept {
  switch (k) {
    case RateKind::geometric: return "geometric";
    case RateKind::logarithmic: return "logarithmic";
    case RateKind::alternative: return "alternative";
  }
  return "unknown";
}

}  // namespace acr
