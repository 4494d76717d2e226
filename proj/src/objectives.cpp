#include "acr/objectives.hpp"

#include <cmath>
#include <stdexcept>

#include "acr/errors.hpp"

namespace acr {

ObjectiveSpec make_objective(std::string_view name, int dimension) {
  if (dimension < 1) throw ConfigError("objective dimension must be >= 1");
  ObjectiveSpec spec;
  spec.name = std::string(name);
  spec.dimension = dimension;
  if (name == "onemax") {
    spec.kind = ObjectiveKind::onemax;
    spec.direction = Direction::maximize;
    spec.f_opt = static_cast<double>(dimension);
  } else if (name == "ackley") {
    spec.kind = ObjectiveKind::ackley;
    spec.direction = Direction::minimize;
    spec.f_opt = 0.0;
    spec.bounds = Bounds{kAckleyLow, kAckleyHigh};
  } else {
    throw ConfigError("unknown objective '" + std::string(name) + "'");
  }
  return spec;
}

double onemax(std::span<const std::uint8_t> bits) {
  double ones = 0.0;
  for (auto b : bits) ones += b != 0 ? 1.0 : 0.0;
  return ones;
}

double ackley(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("ackley: empty input");
  double squares = 0.0;
  double cosines = 0.0;
  for (double xi : x) {
    if (!(xi >= kAckleyLow && xi <= kAckleyHigh))
      throw std::domain_error("ackley: coordinate " + std::to_string(xi) + " out of bounds");
    const double shifted = xi + kEuler;
    squares += shifted * shifted;
    cosines += std::cos(2.0 * std::numbers::pi * xi + 2.0 * std::numbers::pi * kEuler);
  }
  const double n = static_cast<double>(x.size());
  return -20.0 * std::exp(-0.2 * std::sqrt(squares / n)) - std::exp(cosines / n) + 20.0 +
         kEuler;
}

ObjectiveSpec scale_wrap(const ObjectiveSpec& base, double c) {
  if (!(c > 0.0) || !std::isfinite(c))
    throw std::invalid_argument("scale_wrap: factor must be positive and finite");
  ObjectiveSpec out = base;
  out.scale = base.scale * c;
  if (base.f_opt) out.f_opt = *base.f_opt * c;
  return out;
}

double evaluate(const ObjectiveSpec& objective, std::span<const std::uint8_t> bits) {
  if (objective.kind != ObjectiveKind::onemax)
    throw std::invalid_argument("objective '" + objective.name + "' is not defined on bitstrings");
  if (bits.size() != static_cast<std::size_t>(objective.dimension))
    throw DimensionError("bitstring length does not match objective dimension");
  return objective.scale * onemax(bits);
}

double evaluate(const ObjectiveSpec& objective, std::span<const double> x) {
  if (objective.kind != ObjectiveKind::ackley)
    throw std::invalid_argument("objective '" + objective.name + "' is not continuous");
  if (x.size() != static_cast<std::size_t>(objective.dimension))
    throw DimensionError("point dimension does not match objective dimension");
  return objective.scale * ackley(x);
}

}  // namespace acr
