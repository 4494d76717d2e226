#include "acr/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <iostream>
#include <json.hpp>
#include <set>

#include "acr/errors.hpp"
#include "acr/model_io.hpp"
#include "acr/objectives.hpp"
#include "acr/onemax_chain.hpp"

#ifndef ACR_VERSION
#define ACR_VERSION "0.0.0-unknown"
#endif

namespace acr {

namespace {

using nlohmann::json;

template <class T>
T get_or(const json& obj, const char* key, T fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config: field '") + key + "' has the wrong type");
  }
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const char* where) {
  std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, _] : obj.items())
    if (!allowed.contains(key))
      throw ConfigError(std::string("config: unknown field '") + key + "' in " + where);
}

const json& object_or_empty(const json& obj, const char* key) {
  static const json empty = json::object();
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return empty;
  if (!it->is_object()) throw ConfigError(std::string("config: '") + key + "' must be an object");
  return *it;
}

ChainOptions parse_chain(const json& c) {
  reject_unknown(c, {"source", "n", "variant", "model_file", "init", "t_max"}, "chain");
  ChainOptions out;
  const auto source = get_or<std::string>(c, "source", "onemax");
  if (source == "onemax") out.source = ChainOptions::Source::onemax;
  else if (source == "file") out.source = ChainOptions::Source::file;
  else throw ConfigError("config: chain source must be 'onemax' or 'file'");
  out.n = get_or<int>(c, "n", out.n);
  out.variant = get_or<std::string>(c, "variant", out.variant);
  out.model_file = get_or<std::string>(c, "model_file", "");
  out.init = parse_init(get_or<std::string>(c, "init", "uniform"));
  const auto t_max = get_or<long long>(c, "t_max", static_cast<long long>(out.t_max));
  if (t_max < 1) throw ConfigError("config: chain t_max must be >= 1");
  out.t_max = static_cast<std::size_t>(t_max);
  if (out.source == ChainOptions::Source::file && out.model_file.empty())
    throw ConfigError("config: chain source 'file' needs model_file");
  if (out.variant != "lumped" && out.variant != "full")
    throw ConfigError("config: chain variant must be 'lumped' or 'full'");
  return out;
}

json chain_to_json(const ChainOptions& c) {
  json j;
  j["source"] = c.source == ChainOptions::Source::onemax ? "onemax" : "file";
  j["n"] = c.n;
  j["variant"] = c.variant;
  j["model_file"] = c.model_file.string();
  j["init"] = to_string(c.init);
  j["t_max"] = c.t_max;
  return j;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<std::optional<double>> to_optional(const std::vector<double>& v) {
  return {v.begin(), v.end()};
}

std::vector<std::optional<double>> column_or_empty(const std::optional<RateSeries>& r,
                                                   std::size_t len) {
  if (!r) return std::vector<std::optional<double>>(len);
  return r->values;
}

CsvTable make_table(std::vector<std::string> header,
                    const std::vector<std::vector<std::optional<double>>>& columns) {
  CsvTable t;
  t.header = std::move(header);
  const std::size_t len = columns.front().size();
  t.rows.resize(len);
  for (std::size_t r = 0; r < len; ++r) {
    t.rows[r].push_back(static_cast<double>(r));
    for (const auto& col : columns) t.rows[r].push_back(col[r]);
  }
  return t;
}

}  // namespace

std::string_view version() noexcept { return ACR_VERSION; }

ChainInit parse_init(std::string_view text) {
  if (text == "uniform") return {InitKind::uniform, 1};
  if (text == "perron") return {InitKind::perron, 1};
  if (text.starts_with("point:")) {
    const std::string k(text.substr(6));
    char* end = nullptr;
    const long v = std::strtol(k.c_str(), &end, 10);
    if (k.empty() || end != k.c_str() + k.size() || v < 1)
      throw ConfigError("init 'point:K' needs a positive integer K");
    return {InitKind::point, static_cast<std::size_t>(v)};
  }
  throw ConfigError("unknown init '" + std::string(text) + "' (uniform|perron|point:K)");
}

std::string to_string(const ChainInit& init) {
  switch (init.kind) {
    case InitKind::uniform: return "uniform";
    case InitKind::perron: return "perron";
    case InitKind::point: return "point:" + std::to_string(init.state);
  }
  return "uniform";
}

ExperimentConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  reject_unknown(doc,
                 {"name", "algorithm", "objective", "population_size", "generations", "runs",
                  "seed", "ep", "rates", "chain", "output_dir", "write_traces"},
                 "config");

  ExperimentConfig cfg;
  cfg.name = get_or<std::string>(doc, "name", cfg.name);
  cfg.run.algorithm = parse_algorithm(get_or<std::string>(doc, "algorithm", "onebit_ea"));

  const json& obj = object_or_empty(doc, "objective");
  reject_unknown(obj, {"name", "dimension", "scale"}, "objective");
  cfg.run.objective = make_objective(get_or<std::string>(obj, "name", "onemax"),
                                     get_or<int>(obj, "dimension", 10));
  const double scale = get_or<double>(obj, "scale", 1.0);
  if (!(scale > 0.0)) throw ConfigError("config: objective scale must be positive");
  if (scale != 1.0) cfg.run.objective = scale_wrap(cfg.run.objective, scale);

  const int default_pop = cfg.run.algorithm == Algorithm::onebit_ea ? 1 : 100;
  cfg.run.population_size = get_or<int>(doc, "population_size", default_pop);
  cfg.run.generations = get_or<int>(doc, "generations", 50);
  const auto runs = get_or<long long>(doc, "runs", 1);
  if (runs < 1) throw ConfigError("config: runs must be >= 1");
  cfg.runs = static_cast<std::size_t>(runs);
  cfg.run.seed = get_or<std::uint64_t>(doc, "seed", 0);

  const json& ep = object_or_empty(doc, "ep");
  reject_unknown(ep, {"tournament_size", "eta0", "tau", "tau_prime", "eta_min"}, "ep");
  cfg.run.ep.tournament_size = get_or<int>(ep, "tournament_size", cfg.run.ep.tournament_size);
  cfg.run.ep.eta0 = get_or<double>(ep, "eta0", cfg.run.ep.eta0);
  if (ep.contains("tau") && !ep["tau"].is_null()) cfg.run.ep.tau = get_or<double>(ep, "tau", 0.0);
  if (ep.contains("tau_prime") && !ep["tau_prime"].is_null())
    cfg.run.ep.tau_prime = get_or<double>(ep, "tau_prime", 0.0);
  cfg.run.ep.eta_min = get_or<double>(ep, "eta_min", cfg.run.ep.eta_min);
  cfg.run.ep = resolve_ep_params(cfg.run.ep, cfg.run.objective.dimension);

  const json& rates = object_or_empty(doc, "rates");
  reject_unknown(rates, {"delta_t", "estimators"}, "rates");
  cfg.rates.delta_t = get_or<int>(rates, "delta_t", cfg.rates.delta_t);
  if (cfg.rates.delta_t < 1) throw ConfigError("config: delta_t must be >= 1");
  if (rates.contains("estimators")) {
    const auto names = get_or<std::vector<std::string>>(rates, "estimators", {});
    cfg.rates.geometric = cfg.rates.logarithmic = cfg.rates.alternative = false;
    for (const auto& e : names) {
      if (e == "geometric") cfg.rates.geometric = true;
      else if (e == "logarithmic") cfg.rates.logarithmic = true;
      else if (e == "alternative") cfg.rates.alternative = true;
      else throw ConfigError("config: unknown estimator '" + e + "'");
    }
  }

  if (doc.contains("chain") && !doc["chain"].is_null())
    cfg.chain = parse_chain(object_or_empty(doc, "chain"));
  cfg.output_dir = get_or<std::string>(doc, "output_dir", cfg.output_dir.string());
  cfg.write_traces = get_or<bool>(doc, "write_traces", false);

  check_run_spec(cfg.run);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_text_file(path));
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  j["algorithm"] = std::string(to_string(cfg.run.algorithm));
  j["objective"] = {{"name", cfg.run.objective.name},
                    {"dimension", cfg.run.objective.dimension},
                    {"scale", cfg.run.objective.scale}};
  j["population_size"] = cfg.run.population_size;
  j["generations"] = cfg.run.generations;
  j["runs"] = cfg.runs;
  j["seed"] = cfg.run.seed;
  const auto ep = resolve_ep_params(cfg.run.ep, cfg.run.objective.dimension);
  j["ep"] = {{"tournament_size", ep.tournament_size},
             {"eta0", ep.eta0},
             {"tau", *ep.tau},
             {"tau_prime", *ep.tau_prime},
             {"eta_min", ep.eta_min}};
  json est = json::array();
  if (cfg.rates.geometric) est.push_back("geometric");
  if (cfg.rates.logarithmic) est.push_back("logarithmic");
  if (cfg.rates.alternative) est.push_back("alternative");
  j["rates"] = {{"delta_t", cfg.rates.delta_t}, {"estimators", est}};
  j["chain"] = cfg.chain ? chain_to_json(*cfg.chain) : json(nullptr);
  j["output_dir"] = cfg.output_dir.string();
  j["write_traces"] = cfg.write_traces;
  return j.dump(2);
}

void apply_environment_overrides(ExperimentConfig& config) {
  const char* env = std::getenv("ACR_SEED");
  if (!env || !*env) return;
  char* end = nullptr;
  const unsigned long long seed = std::strtoull(env, &end, 10);
  if (*end != '\0') throw ConfigError("ACR_SEED must be an unsigned integer");
  config.run.seed = seed;
}

// ---------------------------------------------------------------------------

EstimateResult run_estimate(const ExperimentConfig& config, unsigned jobs) {
  EstimateResult res;
  res.traces = run_batch(config.run, config.runs, jobs);
  const auto& obj = config.run.objective;
  res.series = aggregate_mean_fitness(res.traces, obj.f_opt, obj.direction);

  const std::size_t len = res.series.f_bar.size();
  std::vector<std::optional<double>> gap(len);
  if (obj.f_opt) {
    gap = to_optional(gap_series(res.series));
    for (auto& g : gap) g = std::abs(*g);
    if (config.rates.geometric) res.geometric = geometric_rate(res.series);
    if (config.rates.logarithmic) res.logarithmic = logarithmic_rate(res.series);
  }
  if (config.rates.alternative && len >= 2 * static_cast<std::size_t>(config.rates.delta_t) + 1)
    res.alternative = alternative_rate(res.series, config.rates.delta_t);

  res.table = make_table({"t", "f_bar", "gap", "R_geom", "R_log", "R_alt"},
                         {to_optional(res.series.f_bar), gap, column_or_empty(res.geometric, len),
                          column_or_empty(res.logarithmic, len),
                          column_or_empty(res.alternative, len)});
  return res;
}

EstimateResult cmd_estimate(const ExperimentConfig& config, unsigned jobs) {
  const auto start = std::chrono::steady_clock::now();
  const std::string started_at = utc_timestamp();
  auto res = run_estimate(config, jobs);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const auto& dir = config.output_dir;
  save_csv(dir / "rates.csv", res.table);
  save_dat(dir / "R_geom.dat", res.table.column_values("R_geom"));
  save_dat(dir / "R_log.dat", res.table.column_values("R_log"));
  save_dat(dir / "R_alt.dat", res.table.column_values("R_alt"));
  save_dat(dir / "gap.dat", res.table.column_values("gap"));
  if (config.write_traces) {
    for (std::size_t i = 0; i < res.traces.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "run_%05zu.csv", i);
      save_csv(dir / "traces" / name,
               make_table({"t", "best_fitness"}, {to_optional(res.traces[i].values)}));
    }
  }

  json manifest;
  manifest["command"] = "estimate";
  manifest["version"] = std::string(version());
  manifest["config"] = json::parse(config_to_json(config));
  manifest["jobs"] = jobs;
  manifest["started_at"] = started_at;
  manifest["wall_time_seconds"] = wall;
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
  return res;
}

// ---------------------------------------------------------------------------

TransitionModel build_chain(const ChainOptions& options) {
  if (options.source == ChainOptions::Source::file) return load_model(options.model_file);
  try {
    return options.variant == "full" ? onemax_chain::build_full(options.n)
                                     : onemax_chain::build_lumped(options.n);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

DistributionVector initial_distribution(const TransitionModel& model,
                                        const ChainOptions& options) {
  switch (options.init.kind) {
    case InitKind::perron:
      return perron_init(model);
    case InitKind::point: {
      if (options.init.state > model.size())
        throw ConfigError("point init state " + std::to_string(options.init.state) +
                          " exceeds model size " + std::to_string(model.size()));
      DistributionVector q;
      q.mass.assign(model.size(), 0.0);
      q.mass[options.init.state - 1] = 1.0;
      return q;
    }
    case InitKind::uniform:
      break;
  }
  if (options.source == ChainOptions::Source::onemax)
    return onemax_chain::binomial_init(options.n, options.variant == "lumped");
  // Uniform over the model's non-optimal states.
  DistributionVector q;
  q.mass.assign(model.size(), 1.0 / static_cast<double>(model.size()));
  return q;
}

AnalysisReport analyze_model(const TransitionModel& model, const DistributionVector& q0,
                             std::size_t t_max, int delta_t) {
  require_valid(model);
  AnalysisReport rep;
  rep.delta_t = delta_t;
  rep.spectral = spectral_radius(model);
  rep.r_infinity = 1.0 - rep.spectral.rho;
  rep.hitting_times = hitting_times(model);
  rep.hitting_time_max = *std::max_element(rep.hitting_times.begin(), rep.hitting_times.end());
  rep.g_condition = check_g_condition(model, delta_t);

  const auto signed_gaps = exact_gap_curve(model, q0, t_max);
  rep.gap.resize(signed_gaps.size());
  for (std::size_t t = 0; t < signed_gaps.size(); ++t) rep.gap[t] = std::abs(signed_gaps[t]);
  if (!(rep.gap[0] > 0.0)) throw ConfigError("analyze: initial distribution has zero gap");
  rep.prediction.resize(signed_gaps.size());
  for (std::size_t t = 0; t < signed_gaps.size(); ++t)
    rep.prediction[t] = std::pow(rep.spectral.rho, static_cast<double>(t)) * rep.gap[0];
  rep.exact_rate = exact_rate_curve(model, q0, t_max);

  // R++ only sees differences, so feed it -gap rather than f_opt - gap and
  // keep the precision of small gaps.
  MeanFitnessSeries exact;
  exact.f_opt = 0.0;
  exact.direction = model.direction();
  exact.f_bar.resize(signed_gaps.size());
  for (std::size_t t = 0; t < signed_gaps.size(); ++t) exact.f_bar[t] = -signed_gaps[t];
  if (signed_gaps.size() >= 2 * static_cast<std::size_t>(delta_t) + 1)
    rep.exact_alternative = alternative_rate(exact, delta_t, 0.0);

  const std::size_t len = signed_gaps.size();
  rep.curves = make_table({"t", "gap", "prediction", "R_exact", "R_alt_exact"},
                          {to_optional(rep.gap), to_optional(rep.prediction),
                           rep.exact_rate.values, column_or_empty(rep.exact_alternative, len)});

  json j;
  j["version"] = std::string(version());
  j["states"] = model.size();
  j["rho"] = rep.spectral.rho;
  j["R_infinity"] = rep.r_infinity;
  j["collatz_lower"] = rep.spectral.collatz_lower;
  j["collatz_upper"] = rep.spectral.collatz_upper;
  j["spectral_method"] =
      rep.spectral.method == SpectralMethod::power_iteration ? "power_iteration" : "bisection";
  j["spectral_iterations"] = rep.spectral.iterations;
  j["hitting_time_max"] = rep.hitting_time_max;
  j["hitting_time_bound_holds"] = rep.hitting_time_max >= 1.0 / rep.r_infinity;
  j["delta_t"] = delta_t;
  j["g_condition_holds"] = rep.g_condition.holds;
  j["initial_gap"] = rep.gap[0];
  j["t_max"] = t_max;
  rep.report_json = j.dump(2) + "\n";
  return rep;
}

AnalysisReport cmd_analyze(const ChainOptions& options, int delta_t,
                           const std::filesystem::path& output_dir) {
  const TransitionModel model = build_chain(options);
  const auto violations = validate(model);
  if (!violations.empty()) {
    json j;
    j["valid"] = false;
    j["violations"] = violations;
    write_text_file(output_dir / "report.json", j.dump(2) + "\n");
    throw ValidationError(violations);
  }
  const auto q0 = initial_distribution(model, options);
  AnalysisReport rep = analyze_model(model, q0, options.t_max, delta_t);

  json j = json::parse(rep.report_json);
  j["valid"] = true;
  j["chain"] = chain_to_json(options);
  rep.report_json = j.dump(2) + "\n";
  write_text_file(output_dir / "report.json", rep.report_json);
  save_csv(output_dir / "curves.csv", rep.curves);
  save_dat(output_dir / "gap.dat", rep.curves.column_values("gap"));
  save_dat(output_dir / "prediction.dat", rep.curves.column_values("prediction"));
  save_dat(output_dir / "R_exact.dat", rep.curves.column_values("R_exact"));
  save_dat(output_dir / "R_alt_exact.dat", rep.curves.column_values("R_alt_exact"));
  if (!rep.g_condition.holds)
    std::cerr << "warning: g-condition fails for delta_t=" << delta_t
              << "; R-double-dagger may not approach 1 - rho\n";
  return rep;
}

CsvTable cmd_compare(const ExperimentConfig& a, const ExperimentConfig& b, unsigned jobs,
                     const std::filesystem::path& out_file) {
  if (a.run.generations != b.run.generations)
    throw ConfigError("compare: horizons differ (" + std::to_string(a.run.generations) + " vs " +
                      std::to_string(b.run.generations) + ")");
  if (a.rates.delta_t != b.rates.delta_t)
    throw ConfigError("compare: estimator options differ");
  ExperimentConfig ga = a, gb = b;
  ga.rates = gb.rates = RateOptions{a.rates.delta_t, true, false, false};
  const auto ra = run_estimate(ga, jobs);
  const auto rb = run_estimate(gb, jobs);
  if (!ra.geometric || !rb.geometric)
    throw ConfigError("compare: both objectives need a known optimum");
  auto table = make_table({"t", "R_a", "R_b"}, {ra.geometric->values, rb.geometric->values});
  save_csv(out_file, table);
  return table;
}

TransitionModel cmd_chain_export(int n, std::string_view variant,
                                 const std::filesystem::path& out_file) {
  ChainOptions opts;
  opts.n = n;
  opts.variant = std::string(variant);
  if (opts.variant != "lumped" && opts.variant != "full")
    throw ConfigError("chain variant must be 'lumped' or 'full'");
  auto model = build_chain(opts);
  save_model(out_file, model);
  return model;
}

}  // namespace acr
