#pragma once

// Exact analysis of a discrete EA modelled as an absorbing Markov chain.
//
// Only the non-optimal part of the chain is stored: the sub-stochastic block
// Q among non-optimal states and the escape column B into the optimal set.
// The distribution over non-optimal states evolves as q_t^T = q_{t-1}^T Q and
// the mean fitness gap is f_opt - f_t = q_t^T (f_opt 1 - f).

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "acr/series.hpp"

namespace acr {

/// Square nonnegative matrix in compressed-row form.
class SparseMatrix {
 public:
  struct Entry {
    std::size_t col;
    double value;
  };

  SparseMatrix() = default;
  /// Rows given as (column, value) lists. Zero values are dropped and
  /// duplicate columns within a row are summed.
  SparseMatrix(std::size_t n, const std::vector<std::vector<Entry>>& rows);

  static SparseMatrix from_dense(const std::vector<std::vector<double>>& rows);

  std::size_t size() const noexcept { return n_; }
  std::size_t nonzeros() const noexcept { return entries_.size(); }
  std::span<const Entry> row(std::size_t i) const;
  double at(std::size_t i, std::size_t j) const;
  double row_sum(std::size_t i) const;

  /// out^T = v^T M
  void left_multiply(std::span<const double> v, std::span<double> out) const;
  /// out = M x
  void right_multiply(std::span<const double> x, std::span<double> out) const;

  /// True when every entry above the diagonal is below `threshold`.
  bool is_lower_triangular(double threshold = 1e-15) const;

  std::vector<std::vector<double>> to_dense() const;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_start_{0};
  std::vector<Entry> entries_;
};

/// Absorbing-chain model of a discrete EA restricted to its non-optimal states.
class TransitionModel {
 public:
  TransitionModel(std::vector<std::string> state_labels, SparseMatrix transitions,
                  std::vector<double> escape, std::vector<double> fitness, double f_opt,
                  Direction direction);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& state_labels() const noexcept { return labels_; }
  /// Q: transitions among non-optimal states, entry (i, j) = Pr(X_i -> X_j).
  const SparseMatrix& transitions() const noexcept { return q_; }
  /// B: per-state probability of entering the optimal set in one step.
  const std::vector<double>& escape() const noexcept { return b_; }
  const std::vector<double>& fitness() const noexcept { return f_; }
  double f_opt() const noexcept { return f_opt_; }
  Direction direction() const noexcept { return direction_; }

  /// f_opt 1 - f, the per-state signed fitness gap.
  std::vector<double> gap_vector() const;

 private:
  std::vector<std::string> labels_;
  SparseMatrix q_;
  std::vector<double> b_;
  std::vector<double> f_;
  double f_opt_;
  Direction direction_;
};

/// Probability mass over non-optimal states at a given generation. Mass
/// missing from the total sits in the optimal set.
struct DistributionVector {
  std::vector<double> mass;
  std::size_t generation = 0;

  double total() const;
};

enum class SpectralMethod { power_iteration, bisection };

struct SpectralEstimate {
  double rho = 0.0;
  std::vector<double> left_eigenvector;
  double collatz_lower = 0.0;
  double collatz_upper = 0.0;
  std::size_t iterations = 0;
  SpectralMethod method = SpectralMethod::power_iteration;
};

/// One power-iteration step, reported to SpectralOptions::observer.
struct CollatzStep {
  std::size_t iteration;
  double lower;
  double upper;
};

struct SpectralOptions {
  double tol = 1e-12;
  std::size_t max_iter = 100'000;
  /// Matrices up to this dimension fall back to pivot bisection when power
  /// iteration stalls.
  std::size_t bisection_max_dim = 64;
  std::function<void(const CollatzStep&)> observer;
};

struct GCondition {
  bool holds = false;
  std::vector<double> g;
};

inline constexpr double kRowSumTolerance = 1e-12;

/// Every broken model invariant, one message per offending row or entry.
std::vector<std::string> validate(const TransitionModel& model);
/// Throws ValidationError when validate() is non-empty.
void require_valid(const TransitionModel& model);

DistributionVector propagate(const TransitionModel& model, const DistributionVector& q0,
                             std::size_t t);

/// Signed gap f_opt - f_t = q_t^T (f_opt 1 - f).
double exact_mean_fitness_gap(const TransitionModel& model, const DistributionVector& qt);

/// Signed gaps for t = 0..t_max by repeated propagation.
std::vector<double> exact_gap_curve(const TransitionModel& model, const DistributionVector& q0,
                                    std::size_t t_max);

/// R(t) = 1 - |gap_t / gap_0|^(1/t), t = 1..t_max. Once gap_t is exactly
/// zero every later value is 1.
RateSeries exact_rate_curve(const TransitionModel& model, const DistributionVector& q0,
                            std::size_t t_max);

SpectralEstimate spectral_radius(const SparseMatrix& q, const SpectralOptions& options = {});
SpectralEstimate spectral_radius(const TransitionModel& model,
                                 const SpectralOptions& options = {});

/// 1 - rho(Q).
double asymptotic_rate(const TransitionModel& model, const SpectralOptions& options = {});

/// Expected generations to reach the optimal set from each state, m = (I - Q)^-1 1.
std::vector<double> hitting_times(const TransitionModel& model);

/// rho^t * gap0 for t = 0..t_max.
std::vector<double> decay_prediction(const TransitionModel& model, double gap0,
                                     std::size_t t_max, const SpectralOptions& options = {});

/// g = (I - Q^dt)(f_opt 1 - f); holds when g is strictly signed in the
/// improving direction.
GCondition check_g_condition(const TransitionModel& model, int delta_t);

/// Normalised Perron left eigenvector as a generation-0 distribution.
DistributionVector perron_init(const TransitionModel& model,
                               const SpectralOptions& options = {});

}  // namespace acr
