#pragma once

// Seeded EA runs that record the archive-best fitness per generation.
//
// Three algorithms share the archive framework: the (1+1) elitist EA with
// onebit mutation on bitstrings, and fast (Cauchy) and classical (Gaussian)
// evolutionary programming with self-adaptive step sizes and q-opponent
// tournament selection on bounded continuous domains.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "acr/objectives.hpp"
#include "acr/rng.hpp"
#include "acr/series.hpp"

namespace acr {

enum class Algorithm { onebit_ea, fep, cep };

std::string_view to_string(Algorithm a) noexcept;
Algorithm parse_algorithm(std::string_view name);

/// Evolutionary-programming settings. Unset learning rates resolve from the
/// dimension n as tau = 1/sqrt(2 sqrt(n)), tau' = 1/sqrt(2n).
struct EpParams {
  int tournament_size = 10;
  double eta0 = 3.0;
  std::optional<double> tau;
  std::optional<double> tau_prime;
  double eta_min = 1e-4;
};

/// Copy of `params` with tau and tau' filled in for dimension n.
EpParams resolve_ep_params(const EpParams& params, int n);

struct RunSpec {
  Algorithm algorithm = Algorithm::onebit_ea;
  ObjectiveSpec objective;
  int population_size = 1;
  int generations = 50;
  std::uint64_t seed = 0;
  /// Run index within an experiment; selects the generator stream.
  std::uint64_t stream = 0;
  EpParams ep;
  /// Fixed starting bitstring for onebit_ea instead of a uniform draw.
  std::optional<BitString> initial_bits;
};

/// Throws ConfigError when the algorithm and objective do not fit together.
void check_run_spec(const RunSpec& spec);

/// Executes exactly spec.generations steps. Deterministic in (spec, seed, stream).
FitnessTrace run(const RunSpec& spec);

/// Runs streams 0..runs-1 of `base` on up to `jobs` threads. Results are
/// indexed by stream, so the output does not depend on `jobs`.
std::vector<FitnessTrace> run_batch(const RunSpec& base, std::size_t runs, unsigned jobs);

// ---------------------------------------------------------------------------
// (1+1) EA with onebit mutation

/// Flip bit `index`; keep the child only if strictly better.
BitString step_onebit_at(const BitString& x, const ObjectiveSpec& objective, std::size_t index);
BitString step_onebit(const BitString& x, const ObjectiveSpec& objective, Rng& rng);

// ---------------------------------------------------------------------------
// Evolutionary programming

struct Individual {
  std::vector<double> x;
  std::vector<double> eta;
  double fitness = 0.0;
};

using Population = std::vector<Individual>;

enum class Mutation { cauchy, gaussian };

/// Random draws for one offspring: a perturbation and a normal deviate per
/// coordinate plus one shared normal deviate.
struct MutationDraws {
  std::vector<double> perturbation;
  std::vector<double> coordinate_normal;
  double shared_normal = 0.0;
};

MutationDraws draw_mutation(Mutation kind, std::size_t n, Rng& rng);

/// x' = clamp(x + eta * perturbation), eta' = max(eta_min, eta exp(tau' N + tau N_j)).
/// The offspring is not evaluated.
Individual apply_mutation(const Individual& parent, const MutationDraws& draws,
                          const ObjectiveSpec& objective, const EpParams& resolved);

/// Opponent indices for a pool of `pool` individuals: q per individual, drawn
/// uniformly from the others. Row-major, pool * q entries.
std::vector<std::size_t> draw_opponents(std::size_t pool, int q, Rng& rng);

/// Indices of the `mu` survivors. Each individual scores a win per opponent it
/// is not worse than; ranking is by wins, ties to the lower index.
std::vector<std::size_t> select_survivors(std::span<const double> fitness,
                                          std::span<const std::size_t> opponents, int q,
                                          std::size_t mu, Direction direction);

/// Uniform random population with step sizes eta0, evaluated.
Population initial_population(const ObjectiveSpec& objective, std::size_t mu,
                              const EpParams& resolved, Rng& rng);

Population step_ep(const Population& parents, Mutation kind, const ObjectiveSpec& objective,
                   const EpParams& resolved, Rng& rng);

inline Population step_fep(const Population& parents, const ObjectiveSpec& objective,
                           const EpParams& resolved, Rng& rng) {
  return step_ep(parents, Mutation::cauchy, objective, resolved, rng);
}

inline Population step_cep(const Population& parents, const ObjectiveSpec& objective,
                           const EpParams& resolved, Rng& rng) {
  return step_ep(parents, Mutation::gaussian, objective, resolved, rng);
}

}  // namespace acr
