#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace acr {

enum class Direction { maximize, minimize };

std::string_view to_string(Direction d) noexcept;
Direction parse_direction(std::string_view name);

/// One run's archive-best fitness, indexed by generation 0..t_max.
struct FitnessTrace {
  std::vector<double> values;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  /// First generation whose archive fitness equals f_opt (discrete objectives only).
  std::optional<std::size_t> hit_generation;
};

/// Pointwise mean of best fitness over T runs.
struct MeanFitnessSeries {
  std::vector<double> f_bar;
  std::size_t run_count = 1;
  std::optional<double> f_opt;
  Direction direction = Direction::maximize;
};

enum class RateKind { geometric, logarithmic, alternative };

std::string_view to_string(RateKind k) noexcept;

/// Rate values indexed by generation. Missing entries are undefined at that
/// generation (t = 0 for R and R-dagger; outside [dt, t_max - dt] for R-double-dagger).
struct RateSeries {
  RateKind kind = RateKind::geometric;
  std::vector<std::optional<double>> values;
  std::optional<int> delta_t;
};

}  // namespace acr
