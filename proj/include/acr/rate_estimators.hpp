#pragma once

// Average convergence rates computed from mean-fitness series.
//
//   geometric    R(t)   = 1 - |(f_opt - f_t) / (f_opt - f_0)|^(1/t)
//   logarithmic  R+(t)  = -(1/t) log |(f_opt - f_t) / (f_opt - f_0)|
//   alternative  R++(t) = 1 - |(f_{t+dt} - f_t) / (f_t - f_{t-dt})|^(1/dt)
//
// The alternative rate needs no f_opt and is defined for dt <= t <= t_max - dt.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "acr/series.hpp"

namespace acr {

/// Gaps (or difference denominators) at or below this magnitude count as zero.
inline constexpr double kGapEpsilon = 1e-12;

/// Pointwise mean over equal-length traces.
MeanFitnessSeries aggregate_mean_fitness(std::span<const FitnessTrace> traces,
                                         std::optional<double> f_opt, Direction direction);

/// Once the gap reaches zero the rate is 1 from there on; a zero initial gap
/// makes the whole series 1.
RateSeries geometric_rate(const MeanFitnessSeries& series);

/// A zero gap at t gives +infinity at t.
RateSeries logarithmic_rate(const MeanFitnessSeries& series);

/// Indices whose denominator |f_t - f_{t-dt}| is at most `epsilon` stay
/// undefined. Exact (noise-free) series can pass 0.
RateSeries alternative_rate(const MeanFitnessSeries& series, int delta_t,
                            double epsilon = kGapEpsilon);

/// Signed gaps f_opt - f_bar_t.
std::vector<double> gap_series(const MeanFitnessSeries& series);

/// Per-generation bootstrap standard error of a rate estimator: resample the
/// runs with replacement `replicates` times, recompute the rate, and take the
/// sample standard deviation of each defined entry. Entries undefined in
/// every replicate stay empty.
std::vector<std::optional<double>> bootstrap_standard_error(
    std::span<const FitnessTrace> traces, std::optional<double> f_opt, Direction direction,
    const std::function<RateSeries(const MeanFitnessSeries&)>& estimator,
    std::size_t replicates, std::uint64_t seed);

}  // namespace acr
