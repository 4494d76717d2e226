#include "acr/chain_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "acr/errors.hpp"
#include "dense_lu.hpp"

namespace acr {

namespace {

// Iterate entries at or below this are treated as zero in Collatz ratios.
constexpr double kCollatzFloor = 1e-300;

std::string describe(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void require_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw DimensionError(std::string(what) + ": length " + std::to_string(got) +
                         " does not match model size " + std::to_string(want));
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void normalize_mass(std::vector<double>& v) {
  const double s = std::accumulate(v.begin(), v.end(), 0.0);
  for (double& x : v) x /= s;
}

// lambda*I - Q is a nonsingular M-matrix exactly when lambda > rho(Q); for a
// Z-matrix that is equivalent to all pivots of unpivoted elimination being
// positive (all leading principal minors positive).
bool shifted_is_m_matrix(const std::vector<double>& q, std::size_t n, double lambda) {
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] = (i == j ? lambda : 0.0) - q[i * n + j];
  for (std::size_t k = 0; k < n; ++k) {
    const double pivot = a[k * n + k];
    if (!(pivot > 0.0)) return false;
    for (std::size_t i = k + 1; i < n; ++i) {
      const double factor = a[i * n + k] / pivot;
      if (factor == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) a[i * n + j] -= factor * a[k * n + j];
    }
  }
  return true;
}

SpectralEstimate bisection_estimate(const SparseMatrix& q, const SpectralOptions& options) {
  const std::size_t n = q.size();
  std::vector<double> dense(n * n, 0.0);
  double upper = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& e : q.row(i)) dense[i * n + e.col] = e.value;
    upper = std::max(upper, q.row_sum(i));
  }
  double lo = 0.0;
  double hi = upper + 1e-9;
  while (!shifted_is_m_matrix(dense, n, hi)) hi *= 2.0;

  std::size_t steps = 0;
  while (hi - lo > options.tol && steps < 2000) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (shifted_is_m_matrix(dense, n, mid) ? hi : lo) = mid;
    ++steps;
  }

  SpectralEstimate est;
  est.rho = 0.5 * (lo + hi);
  est.collatz_lower = lo;
  est.collatz_upper = hi;
  est.iterations = steps;
  est.method = SpectralMethod::bisection;

  // Left eigenvector by inverse iteration just above rho: (mu I - Q)^-1 is
  // nonnegative there, so iterates stay in the nonnegative cone.
  const double mu = hi + std::max(options.tol, 1e-10);
  std::vector<double> shifted_t(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      shifted_t[j * n + i] = (i == j ? mu : 0.0) - dense[i * n + j];
  std::vector<double> v(n, 1.0 / static_cast<double>(n));
  if (auto lu = detail::DenseLu::factor(std::move(shifted_t), n, 0.0)) {
    for (int it = 0; it < 60; ++it) {
      auto y = lu->solve(v);
      for (double& x : y) x = std::max(x, 0.0);
      const double s = std::accumulate(y.begin(), y.end(), 0.0);
      if (!(s > 0.0) || !std::isfinite(s)) break;
      for (double& x : y) x /= s;
      v = std::move(y);
    }
  }
  est.left_eigenvector = std::move(v);
  return est;
}

enum class PowerOutcome { converged, stalled };

PowerOutcome power_iterate(const SparseMatrix& q, std::vector<double>& v,
                           const SpectralOptions& options, SpectralEstimate& est) {
  const std::size_t n = q.size();
  std::vector<double> w(n);
  for (std::size_t k = 1; k <= options.max_iter; ++k) {
    q.left_multiply(v, w);
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    ++est.iterations;
    if (total == 0.0) {
      // Nilpotent: v is annihilated, so it is an eigenvector for 0.
      est.rho = est.collatz_lower = est.collatz_upper = 0.0;
      est.left_eigenvector = v;
      return PowerOutcome::converged;
    }
    double lower = std::numeric_limits<double>::infinity();
    double upper = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (v[i] <= kCollatzFloor) continue;
      const double ratio = w[i] / v[i];
      lower = std::min(lower, ratio);
      upper = std::max(upper, ratio);
    }
    est.collatz_lower = lower;
    est.collatz_upper = upper;
    if (options.observer) options.observer(CollatzStep{est.iterations, lower, upper});
    if (upper - lower <= options.tol) {
      est.rho = 0.5 * (lower + upper);
      est.left_eigenvector = v;
      return PowerOutcome::converged;
    }
    // Entries below the floor no longer enter the bounds; zero them before
    // they turn subnormal and slow every later product.
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = w[i] / total;
      if (v[i] < kCollatzFloor) v[i] = 0.0;
    }
  }
  return PowerOutcome::stalled;
}

}  // namespace

// ---------------------------------------------------------------------------
// SparseMatrix

SparseMatrix::SparseMatrix(std::size_t n, const std::vector<std::vector<Entry>>& rows) : n_(n) {
  if (rows.size() != n) throw DimensionError("SparseMatrix: row count does not match size");
  row_start_.reserve(n + 1);
  for (const auto& r : rows) {
    std::map<std::size_t, double> merged;
    for (const auto& e : r) {
      if (e.col >= n) throw DimensionError("SparseMatrix: column index out of range");
      merged[e.col] += e.value;
    }
    for (const auto& [col, value] : merged)
      if (value != 0.0) entries_.push_back({col, value});
    row_start_.push_back(entries_.size());
  }
}

SparseMatrix SparseMatrix::from_dense(const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size();
  std::vector<std::vector<Entry>> sparse(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) throw DimensionError("matrix is not square");
    for (std::size_t j = 0; j < n; ++j)
      if (rows[i][j] != 0.0) sparse[i].push_back({j, rows[i][j]});
  }
  return SparseMatrix(n, sparse);
}

std::span<const SparseMatrix::Entry> SparseMatrix::row(std::size_t i) const {
  return {entries_.data() + row_start_[i], row_start_[i + 1] - row_start_[i]};
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
  for (const auto& e : row(i))
    if (e.col == j) return e.value;
  return 0.0;
}

double SparseMatrix::row_sum(std::size_t i) const {
  double s = 0.0;
  for (const auto& e : row(i)) s += e.value;
  return s;
}

void SparseMatrix::left_multiply(std::span<const double> v, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    const double vi = v[i];
    if (vi == 0.0) continue;
    for (const auto& e : row(i)) out[e.col] += vi * e.value;
  }
}

void SparseMatrix::right_multiply(std::span<const double> x, std::span<double> out) const {
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    for (const auto& e : row(i)) s += e.value * x[e.col];
    out[i] = s;
  }
}

bool SparseMatrix::is_lower_triangular(double threshold) const {
  for (std::size_t i = 0; i < n_; ++i)
    for (const auto& e : row(i))
      if (e.col > i && std::abs(e.value) >= threshold) return false;
  return true;
}

std::vector<std::vector<double>> SparseMatrix::to_dense() const {
  std::vector<std::vector<double>> out(n_, std::vector<double>(n_, 0.0));
  for (std::size_t i = 0; i < n_; ++i)
    for (const auto& e : row(i)) out[i][e.col] = e.value;
  return out;
}

// ---------------------------------------------------------------------------
// TransitionModel

TransitionModel::TransitionModel(std::vector<std::string> state_labels, SparseMatrix transitions,
                                 std::vector<double> escape, std::vector<double> fitness,
                                 double f_opt, Direction direction)
    : labels_(std::move(state_labels)),
      q_(std::move(transitions)),
      b_(std::move(escape)),
      f_(std::move(fitness)),
      f_opt_(f_opt),
      direction_(direction) {}

std::vector<double> TransitionModel::gap_vector() const {
  std::vector<double> d(f_.size());
  for (std::size_t i = 0; i < f_.size(); ++i) d[i] = f_opt_ - f_[i];
  return d;
}

double DistributionVector::total() const {
  return std::accumulate(mass.begin(), mass.end(), 0.0);
}

// ---------------------------------------------------------------------------
// Analysis

std::vector<std::string> validate(const TransitionModel& model) {
  std::vector<std::string> out;
  const std::size_t n = model.size();
  const auto& q = model.transitions();
  if (n == 0) out.emplace_back("model has no non-optimal states");
  if (q.size() != n)
    out.push_back("Q dimension " + std::to_string(q.size()) + " != state count " +
                  std::to_string(n));
  if (model.fitness().size() != n)
    out.push_back("fitness length " + std::to_string(model.fitness().size()) +
                  " != state count " + std::to_string(n));
  if (model.escape().size() != n)
    out.push_back("B length " + std::to_string(model.escape().size()) + " != state count " +
                  std::to_string(n));
  if (!std::isfinite(model.f_opt())) out.emplace_back("f_opt is not finite");
  if (!out.empty()) return out;

  for (std::size_t i = 0; i < n; ++i) {
    const std::string row = "row " + std::to_string(i) + " (" + model.state_labels()[i] + ")";
    for (const auto& e : q.row(i)) {
      if (!(e.value >= 0.0 && e.value <= 1.0))
        out.push_back(row + ": Q(" + std::to_string(i) + "," + std::to_string(e.col) +
                      ") = " + describe(e.value) + " outside [0,1]");
    }
    const double b = model.escape()[i];
    if (!(b >= 0.0 && b <= 1.0)) out.push_back(row + ": B = " + describe(b) + " outside [0,1]");
    const double total = q.row_sum(i) + b;
    if (!(std::abs(total - 1.0) <= kRowSumTolerance))
      out.push_back(row + ": Q row-sum + B = " + describe(total) + ", expected 1");
    const double f = model.fitness()[i];
    const bool worse = model.direction() == Direction::maximize ? f < model.f_opt()
                                                                : f > model.f_opt();
    if (!worse)
      out.push_back(row + ": fitness " + describe(f) + " is not strictly worse than f_opt " +
                    describe(model.f_opt()));
  }
  return out;
}

void require_valid(const TransitionModel& model) {
  auto violations = validate(model);
  if (!violations.empty()) throw ValidationError(std::move(violations));
}

DistributionVector propagate(const TransitionModel& model, const DistributionVector& q0,
                             std::size_t t) {
  require_valid(model);
  require_size(q0.mass.size(), model.size(), "propagate");
  DistributionVector cur = q0;
  std::vector<double> next(model.size());
  for (std::size_t s = 0; s < t; ++s) {
    model.transitions().left_multiply(cur.mass, next);
    cur.mass.swap(next);
  }
  cur.generation = q0.generation + t;
  return cur;
}

double exact_mean_fitness_gap(const TransitionModel& model, const DistributionVector& qt) {
  require_size(qt.mass.size(), model.size(), "exact_mean_fitness_gap");
  return dot(qt.mass, model.gap_vector());
}

std::vector<double> exact_gap_curve(const TransitionModel& model, const DistributionVector& q0,
                                    std::size_t t_max) {
  require_valid(model);
  require_size(q0.mass.size(), model.size(), "exact_gap_curve");
  const auto d = model.gap_vector();
  std::vector<double> gaps;
  gaps.reserve(t_max + 1);
  std::vector<double> cur = q0.mass;
  std::vector<double> next(model.size());
  gaps.push_back(dot(cur, d));
  for (std::size_t t = 1; t <= t_max; ++t) {
    model.transitions().left_multiply(cur, next);
    cur.swap(next);
    gaps.push_back(dot(cur, d));
  }
  return gaps;
}

RateSeries exact_rate_curve(const TransitionModel& model, const DistributionVector& q0,
                            std::size_t t_max) {
  if (t_max < 1) throw std::invalid_argument("exact_rate_curve: t_max must be >= 1");
  const auto gaps = exact_gap_curve(model, q0, t_max);
  if (gaps[0] == 0.0) throw std::invalid_argument("exact_rate_curve: zero initial gap");

  RateSeries out;
  out.kind = RateKind::geometric;
  out.values.assign(t_max + 1, std::nullopt);
  bool hit = false;
  for (std::size_t t = 1; t <= t_max; ++t) {
    hit = hit || gaps[t] == 0.0;
    out.values[t] = hit ? 1.0
                        : 1.0 - std::pow(std::abs(gaps[t] / gaps[0]),
                                         1.0 / static_cast<double>(t));
  }
  return out;
}

SpectralEstimate spectral_radius(const SparseMatrix& q, const SpectralOptions& options) {
  const std::size_t n = q.size();
  if (n == 0) throw std::invalid_argument("spectral_radius: empty matrix");
  if (!(options.tol > 0.0)) throw std::invalid_argument("spectral_radius: tol must be positive");
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& e : q.row(i))
      if (!(e.value >= 0.0)) throw std::invalid_argument("spectral_radius: Q must be nonnegative");

  SpectralEstimate est;
  std::vector<double> v(n, 1.0 / static_cast<double>(n));
  if (power_iterate(q, v, options, est) == PowerOutcome::converged) return est;

  // Restart from the perturbed iterate so components that collapsed to zero
  // are repopulated.
  for (double& x : v) x += 1e-9;
  normalize_mass(v);
  if (power_iterate(q, v, options, est) == PowerOutcome::converged) return est;

  if (n <= options.bisection_max_dim) {
    auto fallback = bisection_estimate(q, options);
    fallback.iterations += est.iterations;
    return fallback;
  }
  throw NumericalError("spectral_radius: Collatz bounds did not close after " +
                       std::to_string(est.iterations) + " iterations; last bounds [" +
                       describe(est.collatz_lower) + ", " + describe(est.collatz_upper) + "]");
}

SpectralEstimate spectral_radius(const TransitionModel& model, const SpectralOptions& options) {
  require_valid(model);
  return spectral_radius(model.transitions(), options);
}

double asymptotic_rate(const TransitionModel& model, const SpectralOptions& options) {
  return 1.0 - spectral_radius(model, options).rho;
}

std::vector<double> hitting_times(const TransitionModel& model) {
  require_valid(model);
  const auto& q = model.transitions();
  const std::size_t n = q.size();
  std::vector<double> m(n);

  if (q.is_lower_triangular()) {
    // (1 - Q_ii) m_i = 1 + sum_{j<i} Q_ij m_j
    for (std::size_t i = 0; i < n; ++i) {
      double rhs = 1.0;
      double diag = 0.0;
      for (const auto& e : q.row(i)) {
        if (e.col < i) rhs += e.value * m[e.col];
        else if (e.col == i) diag = e.value;
      }
      const double denom = 1.0 - diag;
      if (!(denom > 0.0))
        throw NumericalError("hitting_times: I - Q is singular (state " +
                             model.state_labels()[i] + " never leaves)");
      m[i] = rhs / denom;
    }
    return m;
  }

  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    a[i * n + i] = 1.0;
    for (const auto& e : q.row(i)) a[i * n + e.col] -= e.value;
  }
  auto lu = detail::DenseLu::factor(std::move(a), n);
  if (!lu) throw NumericalError("hitting_times: I - Q is singular (chain is not convergent)");
  const std::vector<double> ones(n, 1.0);
  m = lu->solve(ones);
  for (double x : m)
    if (!std::isfinite(x) || x < 1.0 - 1e-9)
      throw NumericalError("hitting_times: I - Q is numerically singular");
  return m;
}

std::vector<double> decay_prediction(const TransitionModel& model, double gap0,
                                     std::size_t t_max, const SpectralOptions& options) {
  if (!(gap0 > 0.0)) throw std::invalid_argument("decay_prediction: gap0 must be positive");
  const double rho = spectral_radius(model, options).rho;
  std::vector<double> out(t_max + 1);
  for (std::size_t t = 0; t <= t_max; ++t)
    out[t] = std::pow(rho, static_cast<double>(t)) * gap0;
  return out;
}

GCondition check_g_condition(const TransitionModel& model, int delta_t) {
  if (delta_t < 1) throw std::invalid_argument("check_g_condition: delta_t must be >= 1");
  require_valid(model);
  const auto d = model.gap_vector();
  std::vector<double> x = d;
  std::vector<double> next(d.size());
  for (int s = 0; s < delta_t; ++s) {
    model.transitions().right_multiply(x, next);
    x.swap(next);
  }
  GCondition out;
  out.g.resize(d.size());
  out.holds = true;
  for (std::size_t i = 0; i < d.size(); ++i) {
    out.g[i] = d[i] - x[i];
    const bool ok = model.direction() == Direction::maximize ? out.g[i] > 0.0 : out.g[i] < 0.0;
    out.holds = out.holds && ok;
  }
  return out;
}

DistributionVector perron_init(const TransitionModel& model, const SpectralOptions& options) {
  auto est = spectral_radius(model, options);
  DistributionVector q0;
  q0.mass = std::move(est.left_eigenvector);
  normalize_mass(q0.mass);
  q0.generation = 0;
  return q0;
}

}  // namespace acr
