#pragma once

// Transition models of the (1+1) elitist EA with onebit mutation on OneMax.

#include <cstddef>

#include "acr/chain_model.hpp"

namespace acr::onemax_chain {

/// Largest bitstring length accepted by build_full().
inline constexpr int kFullChainMaxBits = 20;

/// Lumped chain over S_k = {x : |x| = n - k}, k = 1..n, stored in ascending k.
/// Q(k,k) = 1 - k/n, Q(k,k-1) = k/n for k >= 2; S_1 escapes with probability 1/n.
TransitionModel build_lumped(int n);

/// Bitstring-level chain over all 2^n - 1 non-optimal strings, ordered by
/// descending |x| then numeric value, so Q is lower-triangular. Labels are the
/// bitstrings, character i being bit i.
TransitionModel build_full(int n);

/// Uniform random initial bitstring, restricted to non-optimal states.
DistributionVector binomial_init(int n, bool lumped);

}  // namespace acr::onemax_chain
