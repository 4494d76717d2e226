#include "acr/rate_estimators.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "acr/errors.hpp"
#include "acr/rng.hpp"

namespace acr {

namespace {

void require_f_opt(const MeanFitnessSeries& s, const char* who) {
  if (!s.f_opt) throw std::invalid_argument(std::string(who) + ": f_opt is required");
  if (s.f_bar.size() < 2) throw std::invalid_argument(std::string(who) + ": series too short");
}

}  // namespace

MeanFitnessSeries aggregate_mean_fitness(std::span<const FitnessTrace> traces,
                                         std::optional<double> f_opt, Direction direction) {
  if (traces.empty()) throw std::invalid_argument("aggregate_mean_fitness: no traces");
  const std::size_t len = traces.front().values.size();
  MeanFitnessSeries out;
  out.f_bar.assign(len, 0.0);
  out.run_count = traces.size();
  out.f_opt = f_opt;
  out.direction = direction;
  // Summed in run order so the result is independent of how runs were scheduled.
  for (const auto& tr : traces) {
    if (tr.values.size() != len)
      throw DimensionError("aggregate_mean_fitness: traces differ in length");
    for (std::size_t t = 0; t < len; ++t) out.f_bar[t] += tr.values[t];
  }
  const double count = static_cast<double>(traces.size());
  for (double& f : out.f_bar) f /= count;
  return out;
}

std::vector<double> gap_series(const MeanFitnessSeries& series) {
  if (!series.f_opt) throw std::invalid_argument("gap_series: f_opt is required");
  std::vector<double> gaps(series.f_bar.size());
  for (std::size_t t = 0; t < gaps.size(); ++t) gaps[t] = *series.f_opt - series.f_bar[t];
  return gaps;
}

RateSeries geometric_rate(const MeanFitnessSeries& series) {
  require_f_opt(series, "geometric_rate");
  const auto gaps = gap_series(series);
  RateSeries out;
  out.kind = RateKind::geometric;
  out.values.assign(gaps.size(), std::nullopt);
  bool hit = std::abs(gaps[0]) <= kGapEpsilon;
  for (std::size_t t = 1; t < gaps.size(); ++t) {
    hit = hit || std::abs(gaps[t]) <= kGapEpsilon;
    out.values[t] = hit ? 1.0
                        : 1.0 - std::pow(std::abs(gaps[t] / gaps[0]),
                                         1.0 / static_cast<double>(t));
  }
  return out;
}

RateSeries logarithmic_rate(const MeanFitnessSeries& series) {
  require_f_opt(series, "logarithmic_rate");
  const auto gaps = gap_series(series);
  RateSeries out;
  out.kind = RateKind::logarithmic;
  out.values.assign(gaps.size(), std::nullopt);
  constexpr double inf = std::numeric_limits<double>::infinity();
  const bool start_hit = std::abs(gaps[0]) <= kGapEpsilon;
  for (std::size_t t = 1; t < gaps.size(); ++t) {
    if (start_hit || std::abs(gaps[t]) <= kGapEpsilon) {
      out.values[t] = inf;
      continue;
    }
    out.values[t] = -std::log(std::abs(gaps[t] / gaps[0])) / static_cast<double>(t);
  }
  return out;
}

RateSeries alternative_rate(const MeanFitnessSeries& series, int delta_t, double epsilon) {
  if (delta_t < 1) throw std::invalid_argument("alternative_rate: delta_t must be >= 1");
  const auto dt = static_cast<std::size_t>(delta_t);
  const std::size_t len = series.f_bar.size();
  if (len < 2 * dt + 1)
    throw std::invalid_argument("alternative_rate: horizon shorter than 2 * delta_t");

  RateSeries out;
  out.kind = RateKind::alternative;
  out.delta_t = delta_t;
  out.values.assign(len, std::nullopt);
  const auto& f = series.f_bar;
  for (std::size_t t = dt; t + dt < len; ++t) {
    const double denom = f[t] - f[t - dt];
    if (std::abs(denom) <= epsilon) continue;
    const double ratio = (f[t + dt] - f[t]) / denom;
    out.values[t] = 1.0 - std::pow(std::abs(ratio), 1.0 / static_cast<double>(dt));
  }
  return out;
}

std::vector<std::optional<double>> bootstrap_standard_error(
    std::span<const FitnessTrace> traces, std::optional<double> f_opt, Direction direction,
    const std::function<RateSeries(const MeanFitnessSeries&)>& estimator,
    std::size_t replicates, std::uint64_t seed) {
  if (traces.empty()) throw std::invalid_argument("bootstrap_standard_error: no traces");
  if (replicates < 2) throw std::invalid_argument("bootstrap_standard_error: need >= 2 replicates");
  const std::size_t runs = traces.size();
  const std::size_t len = traces.front().values.size();

  std::vector<double> sum(len, 0.0), sum_sq(len, 0.0);
  std::vector<std::size_t> count(len, 0);
  Rng rng(seed, 0xB007'57A9ULL);
  std::vector<FitnessTrace> sample(runs);
  for (std::size_t r = 0; r < replicates; ++r) {
    for (auto& s : sample) s = traces[rng.below(runs)];
    const auto rates = estimator(aggregate_mean_fitness(sample, f_opt, direction));
    for (std::size_t t = 0; t < len && t < rates.values.size(); ++t) {
      const auto& v = rates.values[t];
      if (!v || !std::isfinite(*v)) continue;
      sum[t] += *v;
      sum_sq[t] += *v * *v;
      ++count[t];
    }
  }

  std::vector<std::optional<double>> se(len);
  for (std::size_t t = 0; t < len; ++t) {
    if (count[t] < 2) continue;
    const double k = static_cast<double>(count[t]);
    const double mean = sum[t] / k;
    se[t] = std::sqrt(std::max(0.0, (sum_sq[t] - k * mean * mean) / (k - 1.0)));
  }
  return se;
}

}  // namespace acr
