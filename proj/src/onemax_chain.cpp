#include "acr/onemax_chain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace acr::onemax_chain {

namespace {

void require_positive(int n) {
  if (n < 1) throw std::invalid_argument("OneMax chain requires n >= 1, got " + std::to_string(n));
}

void require_full_range(int n) {
  if (n < 1 || n > kFullChainMaxBits)
    throw std::invalid_argument("full OneMax chain requires 1 <= n <= " +
                                std::to_string(kFullChainMaxBits) + ", got " + std::to_string(n));
}

// Bit i of the label is the i-th character; numeric value reads the label as
// a binary number, character 0 most significant.
std::uint32_t bit_mask(int n, int i) { return std::uint32_t{1} << (n - 1 - i); }

std::string label_of(std::uint32_t x, int n) {
  std::string s(static_cast<std::size_t>(n), '0');
  for (int i = 0; i < n; ++i)
    if (x & bit_mask(n, i)) s[static_cast<std::size_t>(i)] = '1';
  return s;
}

std::vector<std::uint32_t> full_state_order(int n) {
  const std::uint32_t optimum = (std::uint32_t{1} << n) - 1;
  std::vector<std::uint32_t> states(optimum);
  std::iota(states.begin(), states.end(), std::uint32_t{0});
  std::sort(states.begin(), states.end(), [](std::uint32_t a, std::uint32_t b) {
    const int pa = std::popcount(a), pb = std::popcount(b);
    return pa != pb ? pa > pb : a < b;
  });
  return states;
}

double binomial(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

}  // namespace

TransitionModel build_lumped(int n) {
  require_positive(n);
  const auto size = static_cast<std::size_t>(n);
  const double dn = n;
  std::vector<std::string> labels(size);
  std::vector<std::vector<SparseMatrix::Entry>> rows(size);
  std::vector<double> escape(size, 0.0);
  std::vector<double> fitness(size);
  for (int k = 1; k <= n; ++k) {
    const auto i = static_cast<std::size_t>(k - 1);
    labels[i] = "S_" + std::to_string(k);
    fitness[i] = n - k;
    rows[i].push_back({i, 1.0 - k / dn});
    if (k >= 2) rows[i].push_back({i - 1, k / dn});
    else escape[i] = k / dn;
  }
  return TransitionModel(std::move(labels), SparseMatrix(size, rows), std::move(escape),
                         std::move(fitness), dn, Direction::maximize);
}

TransitionModel build_full(int n) {
  require_full_range(n);
  const auto states = full_state_order(n);
  const std::uint32_t optimum = (std::uint32_t{1} << n) - 1;
  std::vector<std::size_t> index_of(optimum + 1, 0);
  for (std::size_t i = 0; i < states.size(); ++i) index_of[states[i]] = i;

  const double p = 1.0 / n;
  std::vector<std::string> labels(states.size());
  std::vector<std::vector<SparseMatrix::Entry>> rows(states.size());
  std::vector<double> escape(states.size(), 0.0);
  std::vector<double> fitness(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    const std::uint32_t x = states[i];
    labels[i] = label_of(x, n);
    fitness[i] = std::popcount(x);
    double stay = 0.0;
    for (int b = 0; b < n; ++b) {
      const std::uint32_t mask = bit_mask(n, b);
      if (x & mask) {
        stay += p;  // flipping a one never strictly improves
        continue;
      }
      const std::uint32_t child = x | mask;
      if (child == optimum) escape[i] += p;
      else rows[i].push_back({index_of[child], p});
    }
    if (stay > 0.0) rows[i].push_back({i, stay});
  }
  return TransitionModel(std::move(labels), SparseMatrix(states.size(), rows), std::move(escape),
                         std::move(fitness), static_cast<double>(n), Direction::maximize);
}

DistributionVector binomial_init(int n, bool lumped) {
  DistributionVector q;
  if (lumped) {
    require_positive(n);
    q.mass.resize(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k)
      q.mass[static_cast<std::size_t>(k - 1)] = binomial(n, k) / std::ldexp(1.0, n);
  } else {
    require_full_range(n);
    q.mass.assign((std::size_t{1} << n) - 1, std::ldexp(1.0, -n));
  }
  return q;
}

}  // namespace acr::onemax_chain
