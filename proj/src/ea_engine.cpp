#include "acr/ea_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

#include "acr/errors.hpp"

namespace acr {

namespace {

struct Archive {
  Direction direction;
  double best;

  void offer(double f) {
    if (better(direction, f, best)) best = f;
  }
};

Population step_ep_tracked(const Population& parents, Mutation kind,
                           const ObjectiveSpec& objective, const EpParams& resolved, Rng& rng,
                           Archive& archive) {
  const std::size_t mu = parents.size();
  const auto n = static_cast<std::size_t>(objective.dimension);

  Population pool = parents;
  pool.reserve(2 * mu);
  for (const auto& parent : parents) {
    const auto draws = draw_mutation(kind, n, rng);
    Individual child = apply_mutation(parent, draws, objective, resolved);
    child.fitness = evaluate(objective, std::span<const double>(child.x));
    archive.offer(child.fitness);
    pool.push_back(std::move(child));
  }

  std::vector<double> fitness(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) fitness[i] = pool[i].fitness;
  const auto opponents = draw_opponents(pool.size(), resolved.tournament_size, rng);
  const auto survivors =
      select_survivors(fitness, opponents, resolved.tournament_size, mu, objective.direction);

  Population next;
  next.reserve(mu);
  for (auto idx : survivors) next.push_back(std::move(pool[idx]));
  return next;
}

FitnessTrace run_onebit(const RunSpec& spec, Rng& rng) {
  const auto n = static_cast<std::size_t>(spec.objective.dimension);
  BitString x(n);
  if (spec.initial_bits) {
    if (spec.initial_bits->size() != n)
      throw ConfigError("initial bitstring length does not match objective dimension");
    x = *spec.initial_bits;
  } else {
    for (auto& b : x) b = static_cast<std::uint8_t>(rng() >> 63);
  }

  FitnessTrace trace;
  trace.values.reserve(static_cast<std::size_t>(spec.generations) + 1);
  auto record = [&](std::size_t t) {
    const double ones = onemax(x);
    trace.values.push_back(spec.objective.scale * ones);
    if (!trace.hit_generation && ones == static_cast<double>(n)) trace.hit_generation = t;
  };
  record(0);
  for (int t = 1; t <= spec.generations; ++t) {
    x = step_onebit(x, spec.objective, rng);
    record(static_cast<std::size_t>(t));
  }
  return trace;
}

FitnessTrace run_ep(const RunSpec& spec, Rng& rng) {
  const auto resolved = resolve_ep_params(spec.ep, spec.objective.dimension);
  const Mutation kind = spec.algorithm == Algorithm::fep ? Mutation::cauchy : Mutation::gaussian;
  auto population = initial_population(
      spec.objective, static_cast<std::size_t>(spec.population_size), resolved, rng);

  Archive archive{spec.objective.direction, population.front().fitness};
  for (const auto& ind : population) archive.offer(ind.fitness);

  FitnessTrace trace;
  trace.values.reserve(static_cast<std::size_t>(spec.generations) + 1);
  trace.values.push_back(archive.best);
  for (int t = 1; t <= spec.generations; ++t) {
    population = step_ep_tracked(population, kind, spec.objective, resolved, rng, archive);
    trace.values.push_back(archive.best);
  }
  return trace;
}

}  // namespace

std::string_view to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::onebit_ea: return "onebit_ea";
    case Algorithm::fep: return "fep";
    case Algorithm::cep: return "cep";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "onebit_ea") return Algorithm::onebit_ea;
  if (name == "fep") return Algorithm::fep;
  if (name == "cep") return Algorithm::cep;
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

EpParams resolve_ep_params(const EpParams& params, int n) {
  EpParams out = params;
  const double dn = n;
  if (!out.tau) out.tau = 1.0 / std::sqrt(2.0 * std::sqrt(dn));
  if (!out.tau_prime) out.tau_prime = 1.0 / std::sqrt(2.0 * dn);
  return out;
}

void check_run_spec(const RunSpec& spec) {
  if (spec.generations < 1) throw ConfigError("generations must be >= 1");
  if (spec.population_size < 1) throw ConfigError("population size must be >= 1");
  if (spec.algorithm == Algorithm::onebit_ea) {
    if (!spec.objective.is_discrete())
      throw ConfigError("onebit_ea requires a bitstring objective");
    if (spec.population_size != 1) throw ConfigError("onebit_ea requires population size 1");
    return;
  }
  if (spec.objective.is_discrete() || !spec.objective.bounds)
    throw ConfigError(std::string(to_string(spec.algorithm)) +
                      " requires a bounded continuous objective");
  if (spec.ep.tournament_size < 1) throw ConfigError("tournament size must be >= 1");
  if (!(spec.ep.eta0 > 0.0)) throw ConfigError("initial step size must be positive");
  if (!(spec.ep.eta_min > 0.0)) throw ConfigError("step size floor must be positive");
  if (spec.initial_bits) throw ConfigError("initial bitstring only applies to onebit_ea");
}

FitnessTrace run(const RunSpec& spec) {
  check_run_spec(spec);
  Rng rng(spec.seed, spec.stream);
  FitnessTrace trace = spec.algorithm == Algorithm::onebit_ea ? run_onebit(spec, rng)
                                                              : run_ep(spec, rng);
  trace.seed = spec.seed;
  trace.stream = spec.stream;
  return trace;
}

std::vector<FitnessTrace> run_batch(const RunSpec& base, std::size_t runs, unsigned jobs) {
  check_run_spec(base);
  std::vector<FitnessTrace> out(runs);
  const unsigned workers =
      static_cast<unsigned>(std::clamp<std::size_t>(jobs == 0 ? 1 : jobs, 1, std::max<std::size_t>(runs, 1)));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < runs; i = next++) {
      try {
        RunSpec spec = base;
        spec.stream = i;
        out[i] = run(spec);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = runs;
      }
    }
  };

  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

BitString step_onebit_at(const BitString& x, const ObjectiveSpec& objective, std::size_t index) {
  if (index >= x.size()) throw std::out_of_range("step_onebit_at: bit index out of range");
  BitString child = x;
  child[index] = child[index] != 0 ? 0 : 1;
  return better(objective.direction, evaluate(objective, std::span<const std::uint8_t>(child)),
                evaluate(objective, std::span<const std::uint8_t>(x)))
             ? child
             : x;
}

BitString step_onebit(const BitString& x, const ObjectiveSpec& objective, Rng& rng) {
  return step_onebit_at(x, objective, static_cast<std::size_t>(rng.below(x.size())));
}

MutationDraws draw_mutation(Mutation kind, std::size_t n, Rng& rng) {
  MutationDraws d;
  d.perturbation.resize(n);
  d.coordinate_normal.resize(n);
  d.shared_normal = rng.normal();
  for (std::size_t j = 0; j < n; ++j) {
    d.perturbation[j] = kind == Mutation::cauchy ? rng.cauchy() : rng.normal();
    d.coordinate_normal[j] = rng.normal();
  }
  return d;
}

Individual apply_mutation(const Individual& parent, const MutationDraws& draws,
                          const ObjectiveSpec& objective, const EpParams& resolved) {
  const std::size_t n = parent.x.size();
  Individual child;
  child.x.resize(n);
  child.eta.resize(n);
  const double tau = resolved.tau.value();
  const double tau_prime = resolved.tau_prime.value();
  for (std::size_t j = 0; j < n; ++j) {
    double xj = parent.x[j] + parent.eta[j] * draws.perturbation[j];
    if (objective.bounds) xj = std::clamp(xj, objective.bounds->low, objective.bounds->high);
    child.x[j] = xj;
    const double eta = parent.eta[j] *
                       std::exp(tau_prime * draws.shared_normal + tau * draws.coordinate_normal[j]);
    child.eta[j] = std::max(eta, resolved.eta_min);
  }
  return child;
}

std::vector<std::size_t> draw_opponents(std::size_t pool, int q, Rng& rng) {
  if (pool < 2) throw std::invalid_argument("draw_opponents: pool needs at least two individuals");
  std::vector<std::size_t> out;
  out.reserve(pool * static_cast<std::size_t>(q));
  for (std::size_t i = 0; i < pool; ++i) {
    for (int k = 0; k < q; ++k) {
      auto j = static_cast<std::size_t>(rng.below(pool - 1));
      out.push_back(j >= i ? j + 1 : j);
    }
  }
  return out;
}

std::vector<std::size_t> select_survivors(std::span<const double> fitness,
                                          std::span<const std::size_t> opponents, int q,
                                          std::size_t mu, Direction direction) {
  const std::size_t pool = fitness.size();
  const auto per = static_cast<std::size_t>(q);
  if (opponents.size() != pool * per)
    throw DimensionError("select_survivors: expected q opponents per individual");
  if (mu > pool) throw std::invalid_argument("select_survivors: mu exceeds pool size");

  std::vector<int> wins(pool, 0);
  for (std::size_t i = 0; i < pool; ++i)
    for (std::size_t k = 0; k < per; ++k)
      if (!better(direction, fitness[opponents[i * per + k]], fitness[i])) ++wins[i];

  std::vector<std::size_t> order(pool);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return wins[a] > wins[b]; });
  order.resize(mu);
  return order;
}

Population initial_population(const ObjectiveSpec& objective, std::size_t mu,
                              const EpParams& resolved, Rng& rng) {
  if (!objective.bounds) throw ConfigError("initial_population requires bounds");
  const auto n = static_cast<std::size_t>(objective.dimension);
  const auto [low, high] = *objective.bounds;
  Population pop(mu);
  for (auto& ind : pop) {
    ind.x.resize(n);
    ind.eta.assign(n, resolved.eta0);
    for (auto& xj : ind.x) xj = std::min(low + (high - low) * rng.uniform(), high);
    ind.fitness = evaluate(objective, std::span<const double>(ind.x));
  }
  return pop;
}

Population step_ep(const Population& parents, Mutation kind, const ObjectiveSpec& objective,
                   const EpParams& resolved, Rng& rng) {
  Archive unused{objective.direction, 0.0};
  return step_ep_tracked(parents, kind, objective, resolved, rng, unused);
}

}  // namespace acr
