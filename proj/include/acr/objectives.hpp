#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "acr/series.hpp"

namespace acr {

using BitString = std::vector<std::uint8_t>;

/// Euler's number as used in the Ackley shift: 2.7182818284590451.
inline constexpr double kEuler = std::numbers::e;

/// Ackley coordinates lie in [-32 - e, 32 - e].
inline constexpr double kAckleyLow = -32.0 - kEuler;
inline constexpr double kAckleyHigh = 32.0 - kEuler;

enum class ObjectiveKind { onemax, ackley };

struct Bounds {
  double low;
  double high;
};

/// A named benchmark with a known optimum, optionally scaled by c > 0.
struct ObjectiveSpec {
  ObjectiveKind kind = ObjectiveKind::onemax;
  std::string name;
  int dimension = 1;
  Direction direction = Direction::maximize;
  std::optional<double> f_opt;
  std::optional<Bounds> bounds;
  double scale = 1.0;

  bool is_discrete() const noexcept { return kind == ObjectiveKind::onemax; }
};

/// Resolves "onemax" or "ackley" at the given dimension.
ObjectiveSpec make_objective(std::string_view name, int dimension);

/// Number of one bits.
double onemax(std::span<const std::uint8_t> bits);

/// Shifted Ackley function, optimum 0 at (-e, ..., -e). Throws
/// std::domain_error for coordinates outside [-32 - e, 32 - e].
double ackley(std::span<const double> x);

/// c * base, with f_opt scaled to match. c must be positive.
ObjectiveSpec scale_wrap(const ObjectiveSpec& base, double c);

double evaluate(const ObjectiveSpec& objective, std::span<const std::uint8_t> bits);
double evaluate(const ObjectiveSpec& objective, std::span<const double> x);

/// True when a is strictly better than b in the objective's direction.
inline bool better(Direction d, double a, double b) noexcept {
  return d == Direction::maximize ? a > b : a < b;
}

}  // namespace acr
