#pragma once

// Experiment configuration and the commands behind the `acr` CLI.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "acr/chain_model.hpp"
#include "acr/csv.hpp"
#include "acr/ea_engine.hpp"
#include "acr/rate_estimators.hpp"

namespace acr {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitValidation = 3;
inline constexpr int kExitNumerical = 4;

/// Version string compiled into manifests.
std::string_view version() noexcept;

enum class InitKind { uniform, perron, point };

struct ChainInit {
  InitKind kind = InitKind::uniform;
  /// 1-based state position for point init (S_K for the lumped OneMax chain).
  std::size_t state = 1;
};

/// Parses "uniform", "perron" or "point:K".
ChainInit parse_init(std::string_view text);
std::string to_string(const ChainInit& init);

struct ChainOptions {
  enum class Source { onemax, file };
  Source source = Source::onemax;
  int n = 10;
  std::string variant = "lumped";
  std::filesystem::path model_file;
  ChainInit init;
  std::size_t t_max = 256;
};

struct RateOptions {
  int delta_t = 10;
  bool geometric = true;
  bool logarithmic = true;
  bool alternative = true;
};

struct ExperimentConfig {
  std::string name = "experiment";
  RunSpec run;
  std::size_t runs = 1;
  RateOptions rates;
  std::optional<ChainOptions> chain;
  std::filesystem::path output_dir = "acr_out";
  bool write_traces = false;
};

/// Parses a JSON experiment document; missing fields take their defaults.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// The config with every default filled in, as JSON.
std::string config_to_json(const ExperimentConfig& config);
/// ACR_SEED, when set, replaces the master seed.
void apply_environment_overrides(ExperimentConfig& config);

// ---------------------------------------------------------------------------
// estimate

struct EstimateResult {
  std::vector<FitnessTrace> traces;
  MeanFitnessSeries series;
  std::optional<RateSeries> geometric;
  std::optional<RateSeries> logarithmic;
  std::optional<RateSeries> alternative;
  /// t,f_bar,gap,R_geom,R_log,R_alt
  CsvTable table;
};

/// T seeded runs, aggregated and turned into rates. Writes nothing.
EstimateResult run_estimate(const ExperimentConfig& config, unsigned jobs);

/// run_estimate plus rates.csv, manifest.json, .dat plot files and (optionally)
/// per-run traces under config.output_dir.
EstimateResult cmd_estimate(const ExperimentConfig& config, unsigned jobs);

// ---------------------------------------------------------------------------
// analyze

struct AnalysisReport {
  SpectralEstimate spectral;
  double r_infinity = 0.0;
  std::vector<double> hitting_times;
  double hitting_time_max = 0.0;
  int delta_t = 10;
  GCondition g_condition;
  std::vector<double> gap;         // |f_opt - f_t|, t = 0..t_max
  std::vector<double> prediction;  // rho^t |f_opt - f_0|
  RateSeries exact_rate;
  std::optional<RateSeries> exact_alternative;
  /// t,gap,prediction,R_exact,R_alt_exact
  CsvTable curves;
  std::string report_json;
};

TransitionModel build_chain(const ChainOptions& options);
DistributionVector initial_distribution(const TransitionModel& model, const ChainOptions& options);

/// Exact analysis of a validated model. Throws ValidationError otherwise.
AnalysisReport analyze_model(const TransitionModel& model, const DistributionVector& q0,
                             std::size_t t_max, int delta_t);

/// Builds or loads the chain and writes report.json, curves.csv and .dat files.
/// A model that fails validation gets a report listing the violations, then
/// ValidationError is thrown.
AnalysisReport cmd_analyze(const ChainOptions& options, int delta_t,
                           const std::filesystem::path& output_dir);

// ---------------------------------------------------------------------------
// compare / chain export

/// t,R_a,R_b from the geometric rates of two experiments with equal horizons.
CsvTable cmd_compare(const ExperimentConfig& a, const ExperimentConfig& b, unsigned jobs,
                     const std::filesystem::path& out_file);

/// Writes the OneMax chain ("lumped" or "full") as model JSON.
TransitionModel cmd_chain_export(int n, std::string_view variant,
                                 const std::filesystem::path& out_file);

}  // namespace acr
