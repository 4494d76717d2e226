// acr: average convergence rate experiments and exact chain analysis.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <thread>

#include "acr/errors.hpp"
#include "acr/experiments.hpp"
#include "acr/model_io.hpp"
#include "acr/onemax_chain.hpp"

namespace {

unsigned default_jobs() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

acr::ExperimentConfig load(const std::string& path) {
  auto cfg = acr::load_config(path);
  acr::apply_environment_overrides(cfg);
  return cfg;
}

void print_analysis(const acr::AnalysisReport& rep) {
  std::printf("rho               %.17g\n", rep.spectral.rho);
  std::printf("R_infinity        %.17g\n", rep.r_infinity);
  std::printf("collatz bounds    [%.17g, %.17g]\n", rep.spectral.collatz_lower,
              rep.spectral.collatz_upper);
  std::printf("hitting time max  %.17g\n", rep.hitting_time_max);
  std::printf("g-condition (dt=%d) %s\n", rep.delta_t, rep.g_condition.holds ? "holds" : "fails");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Average convergence rate of evolutionary algorithms"};
  app.set_version_flag("--version", std::string(acr::version()));
  app.require_subcommand(1);

  auto* estimate = app.add_subcommand("estimate", "Monte-Carlo estimate of R(t) from seeded runs");
  std::string estimate_config;
  std::string estimate_out;
  unsigned jobs = default_jobs();
  estimate->add_option("--config", estimate_config, "Experiment JSON")->required();
  estimate->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  estimate->add_option("--out", estimate_out, "Override the config's output directory");

  auto* analyze = app.add_subcommand("analyze", "Exact Markov-chain analysis");
  std::string analyze_config;
  int onemax_n = 0;
  std::string variant = "lumped";
  std::string init = "uniform";
  int delta_t = 10;
  std::size_t t_max = 256;
  std::string analyze_out = ".";
  auto* cfg_opt = analyze->add_option("--config", analyze_config, "Experiment JSON with a chain section");
  auto* onemax_opt = analyze->add_option("--onemax", onemax_n, "Analyze the OneMax chain of length N");
  cfg_opt->excludes(onemax_opt);
  auto* variant_opt = analyze->add_option("--variant", variant, "lumped|full")
                          ->check(CLI::IsMember({"lumped", "full"}));
  auto* init_opt = analyze->add_option("--init", init, "uniform|perron|point:K");
  auto* dt_opt = analyze->add_option("--delta-t", delta_t, "Window for R-double-dagger")
                     ->check(CLI::PositiveNumber);
  auto* tmax_opt = analyze->add_option("--t-max", t_max, "Curve horizon")->check(CLI::PositiveNumber);
  analyze->add_option("--out", analyze_out, "Output directory");

  auto* compare = app.add_subcommand("compare", "Side-by-side R(t) of two experiments");
  std::string config_a, config_b, compare_out = "compare.csv";
  compare->add_option("--config-a", config_a)->required();
  compare->add_option("--config-b", config_b)->required();
  compare->add_option("--jobs", jobs)->check(CLI::PositiveNumber);
  compare->add_option("--out", compare_out, "Output CSV");

  auto* chain = app.add_subcommand("chain", "Export transition models");
  chain->require_subcommand(1);
  auto* chain_onemax = chain->add_subcommand("onemax", "OneMax (1+1) EA chain");
  int chain_n = 10;
  std::string chain_variant = "lumped";
  std::string chain_out;
  chain_onemax->add_option("--n", chain_n, "Bitstring length")->required();
  chain_onemax->add_option("--variant", chain_variant)->check(CLI::IsMember({"lumped", "full"}));
  chain_onemax->add_flag_callback("--lumped", [&] { chain_variant = "lumped"; }, "Same as --variant lumped");
  chain_onemax->add_option("--out", chain_out, "Output file (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? acr::kExitOk : acr::kExitConfig;
  }

  try {
    if (*estimate) {
      auto cfg = load(estimate_config);
      if (!estimate_out.empty()) cfg.output_dir = estimate_out;
      const auto res = acr::cmd_estimate(cfg, jobs);
      const auto& last = res.table.rows.back();
      std::printf("%s: %zu runs, %d generations -> %s\n", cfg.name.c_str(), cfg.runs,
                  cfg.run.generations, (cfg.output_dir / "rates.csv").string().c_str());
      if (res.geometric)
        std::printf("R(%d) = %s\n", cfg.run.generations,
                    acr::format_number(last[3]).c_str());
    } else if (*analyze) {
      acr::ChainOptions opts;
      if (!analyze_config.empty()) {
        const auto cfg = load(analyze_config);
        if (!cfg.chain) throw acr::ConfigError("config has no 'chain' section");
        opts = *cfg.chain;
        if (!*dt_opt) delta_t = cfg.rates.delta_t;
      } else if (onemax_n > 0) {
        opts.n = onemax_n;
      } else {
        throw acr::ConfigError("analyze needs --config FILE or --onemax N");
      }
      if (*variant_opt) opts.variant = variant;
      if (*init_opt) opts.init = acr::parse_init(init);
      if (*tmax_opt) opts.t_max = t_max;
      print_analysis(acr::cmd_analyze(opts, delta_t, analyze_out));
    } else if (*compare) {
      const auto a = load(config_a);
      const auto b = load(config_b);
      acr::cmd_compare(a, b, jobs, compare_out);
      std::printf("wrote %s\n", compare_out.c_str());
    } else if (*chain) {
      if (chain_out.empty()) {
        acr::ChainOptions opts;
        opts.n = chain_n;
        opts.variant = chain_variant;
        std::cout << acr::model_to_json(acr::build_chain(opts));
      } else {
        acr::cmd_chain_export(chain_n, chain_variant, chain_out);
      }
    }
  } catch (const acr::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return acr::kExitValidation;
  } catch (const acr::NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return acr::kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return acr::kExitConfig;
  }
  return acr::kExitOk;
}
