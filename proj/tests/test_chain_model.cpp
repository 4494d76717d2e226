#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "acr/chain_model.hpp"
#include "acr/errors.hpp"
#include "acr/onemax_chain.hpp"
#include "oracles.hpp"

using namespace acr;

namespace {

TransitionModel single_state(double stay) {
  return TransitionModel({"X"}, SparseMatrix::from_dense({{stay}}), {1.0 - stay}, {0.0}, 1.0,
                         Direction::maximize);
}

TransitionModel model_from(const oracle::Dense& q, Direction dir = Direction::maximize) {
  const std::size_t n = q.size();
  std::vector<std::string> labels;
  std::vector<double> escape, fitness;
  for (std::size_t i = 0; i < n; ++i) {
    labels.push_back("X" + std::to_string(i));
    double s = 0.0;
    for (double x : q[i]) s += x;
    escape.push_back(1.0 - s);
    fitness.push_back(dir == Direction::maximize ? double(i) : double(i) + 1.0);
  }
  const double f_opt = dir == Direction::maximize ? double(n) : 0.0;
  return TransitionModel(labels, SparseMatrix::from_dense(q), escape, fitness, f_opt, dir);
}

DistributionVector point_mass(std::size_t n, std::size_t i) {
  DistributionVector q;
  q.mass.assign(n, 0.0);
  q.mass[i] = 1.0;
  return q;
}

std::vector<double> residual(const SparseMatrix& q, const SpectralEstimate& est) {
  std::vector<double> out(q.size());
  q.left_multiply(est.left_eigenvector, out);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= est.rho * est.left_eigenvector[i];
  return out;
}

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_SUITE("validate") {
  TEST_CASE("OneMax lumped chain is valid") { CHECK(validate(onemax_chain::build_lumped(10)).empty()); }

  TEST_CASE("one-state chain is valid") { CHECK(validate(single_state(0.5)).empty()); }

  TEST_CASE("row that leaks probability is reported by row") {
    TransitionModel m({"A", "B"}, SparseMatrix::from_dense({{0.5, 0.0}, {0.2, 0.3}}), {0.5, 0.4},
                      {0.0, 1.0}, 2.0, Direction::maximize);
    const auto v = validate(m);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("row 1") != std::string::npos);
    CHECK(v[0].find("row-sum") != std::string::npos);
  }

  TEST_CASE("entries outside [0,1] and non-worse fitness are reported") {
    TransitionModel m({"A", "B"}, SparseMatrix::from_dense({{1.5, 0.0}, {0.0, 0.5}}), {-0.5, 0.5},
                      {0.0, 3.0}, 2.0, Direction::maximize);
    const auto v = validate(m);
    CHECK(v.size() == 3);
  }

  TEST_CASE("minimize direction needs fitness above f_opt") {
    TransitionModel ok({"A"}, SparseMatrix::from_dense({{0.2}}), {0.8}, {1.0}, 0.0,
                       Direction::minimize);
    CHECK(validate(ok).empty());
    TransitionModel bad({"A"}, SparseMatrix::from_dense({{0.2}}), {0.8}, {0.0}, 0.0,
                        Direction::minimize);
    CHECK(validate(bad).size() == 1);
  }

  TEST_CASE("dimension mismatch is a violation") {
    TransitionModel m({"A", "B"}, SparseMatrix::from_dense({{0.5}}), {0.5}, {0.0}, 1.0,
                      Direction::maximize);
    CHECK_FALSE(validate(m).empty());
  }

  TEST_CASE("analytic operations reject invalid models") {
    TransitionModel m({"A"}, SparseMatrix::from_dense({{0.5}}), {0.4}, {0.0}, 1.0,
                      Direction::maximize);
    CHECK_THROWS_AS(spectral_radius(m), ValidationError);
    CHECK_THROWS_AS(hitting_times(m), ValidationError);
    CHECK_THROWS_AS(propagate(m, point_mass(1, 0), 1), ValidationError);
    CHECK_THROWS_AS(check_g_condition(m, 1), ValidationError);
  }
}

TEST_SUITE("propagate") {
  TEST_CASE("one step from S_1 keeps 0.9") {
    const auto m = onemax_chain::build_lumped(10);
    const auto q1 = propagate(m, point_mass(10, 0), 1);
    CHECK(q1.generation == 1);
    CHECK(q1.mass[0] == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(q1.total() == doctest::Approx(0.9).epsilon(1e-15));
  }

  TEST_CASE("t = 0 is the identity") {
    const auto m = onemax_chain::build_lumped(6);
    const auto q0 = onemax_chain::binomial_init(6, true);
    const auto same = propagate(m, q0, 0);
    CHECK(same.mass == q0.mass);
    CHECK(same.generation == 0);
  }

  TEST_CASE("lumped propagation matches the 2^10-state chain") {
    const auto lumped = onemax_chain::build_lumped(10);
    const auto full = onemax_chain::build_full(10);
    const auto a = propagate(lumped, onemax_chain::binomial_init(10, true), 50);
    const auto b = propagate(full, onemax_chain::binomial_init(10, false), 50);
    CHECK(a.total() == doctest::Approx(b.total()).epsilon(1e-12));
    CHECK(exact_mean_fitness_gap(lumped, a) ==
          doctest::Approx(exact_mean_fitness_gap(full, b)).epsilon(1e-12));
  }

  TEST_CASE("dimension mismatch throws") {
    const auto m = onemax_chain::build_lumped(4);
    CHECK_THROWS_AS(propagate(m, point_mass(3, 0), 1), DimensionError);
    CHECK_THROWS_AS(exact_mean_fitness_gap(m, point_mass(5, 0)), DimensionError);
  }

  TEST_CASE("absorption: mass non-increasing and vanishing") {
    std::mt19937_64 gen(11);
    for (std::size_t n = 2; n <= 6; ++n) {
      const auto m = model_from(oracle::random_positive_substochastic(n, gen));
      const auto m_max = hitting_times(m);
      const auto horizon = static_cast<std::size_t>(10.0 * *std::max_element(m_max.begin(), m_max.end()));
      DistributionVector q;
      q.mass.assign(n, 1.0 / n);
      double prev = q.total();
      for (std::size_t t = 0; t < horizon; ++t) {
        q = propagate(m, q, 1);
        CHECK(q.total() <= prev + 1e-15);
        prev = q.total();
      }
      CHECK(prev < 1e-3);
    }
  }
}

TEST_SUITE("exact gap and rate") {
  TEST_CASE("uniform OneMax n=10 has gap exactly 5") {
    const auto m = onemax_chain::build_lumped(10);
    CHECK(exact_mean_fitness_gap(m, onemax_chain::binomial_init(10, true)) ==
          doctest::Approx(5.0).epsilon(1e-14));
  }

  TEST_CASE("zero distribution has zero gap") {
    const auto m = onemax_chain::build_lumped(10);
    DistributionVector zero;
    zero.mass.assign(10, 0.0);
    CHECK(exact_mean_fitness_gap(m, zero) == 0.0);
  }

  TEST_CASE("point mass on S_1 decays as 0.9^t") {
    const auto m = onemax_chain::build_lumped(10);
    const auto gaps = exact_gap_curve(m, point_mass(10, 0), 30);
    for (std::size_t t = 0; t <= 30; ++t)
      CHECK(gaps[t] == doctest::Approx(std::pow(0.9, double(t))).epsilon(1e-13));
  }

  TEST_CASE("minimization gaps are negative") {
    const auto m = model_from({{0.3, 0.2}, {0.1, 0.4}}, Direction::minimize);
    DistributionVector q;
    q.mass = {0.5, 0.5};
    CHECK(exact_mean_fitness_gap(m, q) < 0.0);
  }

  TEST_CASE("rate under Perron init is 0.1") {
    const auto m = onemax_chain::build_lumped(10);
    const auto r = exact_rate_curve(m, perron_init(m), 60);
    CHECK_FALSE(r.values[0].has_value());
    for (std::size_t t = 1; t <= 60; ++t) CHECK(*r.values[t] == doctest::Approx(0.1).epsilon(1e-9));
  }

  TEST_CASE("rate under uniform init at t=50 is near 0.1") {
    const auto m = onemax_chain::build_lumped(10);
    const auto r = exact_rate_curve(m, onemax_chain::binomial_init(10, true), 50);
    CHECK(std::abs(*r.values[50] - 0.1) < 0.01);
  }

  TEST_CASE("no progress in the first step gives R(1) = 0") {
    // The distribution sits on a state whose mass flows only to an equal-gap state.
    TransitionModel m({"A", "B"}, SparseMatrix::from_dense({{0.0, 1.0}, {0.0, 0.5}}), {0.0, 0.5},
                      {1.0, 1.0}, 2.0, Direction::maximize);
    const auto r = exact_rate_curve(m, point_mass(2, 0), 3);
    CHECK(*r.values[1] == doctest::Approx(0.0));
  }

  TEST_CASE("gap reaching zero gives 1 from then on") {
    const auto m = single_state(0.0);
    const auto r = exact_rate_curve(m, point_mass(1, 0), 4);
    for (std::size_t t = 1; t <= 4; ++t) CHECK(*r.values[t] == 1.0);
  }

  TEST_CASE("zero initial gap is rejected") {
    const auto m = onemax_chain::build_lumped(3);
    DistributionVector zero;
    zero.mass.assign(3, 0.0);
    CHECK_THROWS_AS(exact_rate_curve(m, zero, 5), std::invalid_argument);
  }
}

TEST_SUITE("spectral radius") {
  TEST_CASE("OneMax n=10 gives 0.9") {
    const auto est = spectral_radius(onemax_chain::build_lumped(10));
    CHECK(std::abs(est.rho - 0.9) <= 1e-10);
    CHECK(est.collatz_lower <= est.rho);
    CHECK(est.rho <= est.collatz_upper);
    CHECK(est.collatz_upper - est.collatz_lower <= 1e-12);
  }

  TEST_CASE("1x1 matrix") {
    const auto est = spectral_radius(single_state(0.5));
    CHECK(est.rho == doctest::Approx(0.5).epsilon(1e-15));
    REQUIRE(est.left_eigenvector.size() == 1);
    CHECK(est.left_eigenvector[0] == doctest::Approx(1.0));
  }

  TEST_CASE("zero matrix has rho 0") {
    const auto est = spectral_radius(single_state(0.0));
    CHECK(est.rho == 0.0);
    CHECK(asymptotic_rate(single_state(0.0)) == 1.0);
  }

  TEST_CASE("nilpotent matrix has rho 0") {
    const auto est = spectral_radius(SparseMatrix::from_dense({{0.0, 0.0}, {1.0, 0.0}}));
    CHECK(est.rho == 0.0);
  }

  TEST_CASE("random positive 4x4 matches the characteristic polynomial root") {
    std::mt19937_64 gen(2024);
    for (int trial = 0; trial < 10; ++trial) {
      const auto q = oracle::random_positive_substochastic(4, gen);
      const double root = oracle::largest_real_root(q);
      const auto est = spectral_radius(SparseMatrix::from_dense(q));
      CHECK(est.method == SpectralMethod::power_iteration);
      CHECK(std::abs(est.rho - root) <= 1e-8);
    }
  }

  TEST_CASE("eigen-residual is within 10 tol") {
    std::mt19937_64 gen(7);
    for (std::size_t n = 2; n <= 8; ++n) {
      const auto q = SparseMatrix::from_dense(oracle::random_positive_substochastic(n, gen));
      const auto est = spectral_radius(q);
      CHECK(inf_norm(residual(q, est)) <= 10 * 1e-12);
      double s = 0.0;
      for (double x : est.left_eigenvector) {
        CHECK(x >= 0.0);
        s += x;
      }
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("Collatz bounds sandwich and tighten monotonically on positive Q") {
    std::mt19937_64 gen(99);
    for (std::size_t n = 2; n <= 8; ++n) {
      const auto q = SparseMatrix::from_dense(oracle::random_positive_substochastic(n, gen));
      std::vector<CollatzStep> steps;
      SpectralOptions opts;
      opts.observer = [&](const CollatzStep& s) { steps.push_back(s); };
      const auto est = spectral_radius(q, opts);
      REQUIRE_FALSE(steps.empty());
      for (std::size_t k = 0; k < steps.size(); ++k) {
        CHECK(steps[k].lower <= steps[k].upper);
        CHECK(steps[k].lower <= est.rho + 1e-15);
        CHECK(steps[k].upper >= est.rho - 1e-15);
        if (k > 0) {
          CHECK(steps[k].lower >= steps[k - 1].lower - 1e-15);
          CHECK(steps[k].upper <= steps[k - 1].upper + 1e-15);
        }
      }
    }
  }

  TEST_CASE("defective reducible matrix falls back to bisection") {
    // Jordan block at 0.5: Collatz bounds close only like 1/k.
    const auto q = SparseMatrix::from_dense({{0.5, 0.0}, {0.5, 0.5}});
    SpectralOptions opts;
    opts.max_iter = 2000;
    const auto est = spectral_radius(q, opts);
    CHECK(est.method == SpectralMethod::bisection);
    CHECK(std::abs(est.rho - 0.5) <= 1e-10);
    CHECK(est.collatz_lower <= est.rho);
    CHECK(est.rho <= est.collatz_upper);
    CHECK(inf_norm(residual(q, est)) <= 1e-6);
  }

  TEST_CASE("stall above the bisection size limit is a numerical error") {
    const auto q = SparseMatrix::from_dense({{0.5, 0.0}, {0.5, 0.5}});
    SpectralOptions opts;
    opts.max_iter = 100;
    opts.bisection_max_dim = 1;
    CHECK_THROWS_AS(spectral_radius(q, opts), NumericalError);
  }

  TEST_CASE("bad arguments") {
    CHECK_THROWS_AS(spectral_radius(SparseMatrix::from_dense({{-0.1}})), std::invalid_argument);
    SpectralOptions opts;
    opts.tol = 0.0;
    CHECK_THROWS_AS(spectral_radius(SparseMatrix::from_dense({{0.1}}), opts),
                    std::invalid_argument);
  }
}

TEST_SUITE("asymptotic rate and hitting times") {
  TEST_CASE("OneMax asymptotic rate is 1/n") {
    CHECK(std::abs(asymptotic_rate(onemax_chain::build_lumped(10)) - 0.1) <= 1e-10);
    for (int n : {2, 7, 25, 50})
      CHECK(std::abs(asymptotic_rate(onemax_chain::build_lumped(n)) - 1.0 / n) <= 1e-10);
  }

  TEST_CASE("OneMax n=10 hitting time from S_10 is 10 H_10") {
    const auto m = hitting_times(onemax_chain::build_lumped(10));
    CHECK(std::abs(m.back() - oracle::onemax_hitting_time(10)) <= 1e-9);
    CHECK(*std::max_element(m.begin(), m.end()) >= 1.0 / 0.1);
    for (double x : m) CHECK(x >= 1.0);
  }

  TEST_CASE("zero matrix takes exactly one step") {
    const auto m = hitting_times(single_state(0.0));
    CHECK(m == std::vector<double>{1.0});
  }

  TEST_CASE("dense solve agrees with the triangular path") {
    // Same chain with states listed in reverse order is upper-triangular.
    const auto lumped = onemax_chain::build_lumped(6);
    const auto dense = lumped.transitions().to_dense();
    const std::size_t n = dense.size();
    oracle::Dense rev(n, std::vector<double>(n));
    std::vector<std::string> labels(n);
    std::vector<double> escape(n), fitness(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) rev[n - 1 - i][n - 1 - j] = dense[i][j];
      labels[n - 1 - i] = lumped.state_labels()[i];
      escape[n - 1 - i] = lumped.escape()[i];
      fitness[n - 1 - i] = lumped.fitness()[i];
    }
    TransitionModel reversed(labels, SparseMatrix::from_dense(rev), escape, fitness, 6.0,
                             Direction::maximize);
    REQUIRE_FALSE(reversed.transitions().is_lower_triangular());
    const auto a = hitting_times(lumped);
    const auto b = hitting_times(reversed);
    for (std::size_t i = 0; i < n; ++i) CHECK(b[n - 1 - i] == doctest::Approx(a[i]).epsilon(1e-12));
  }

  TEST_CASE("hitting-time bound on random chains") {
    std::mt19937_64 gen(5);
    for (std::size_t n = 2; n <= 8; ++n) {
      const auto m = model_from(oracle::random_positive_substochastic(n, gen));
      const auto h = hitting_times(m);
      CHECK(*std::max_element(h.begin(), h.end()) >= 1.0 / asymptotic_rate(m) - 1e-9);
    }
  }

  TEST_CASE("a trapped state makes I - Q singular") {
    TransitionModel m({"A", "B"}, SparseMatrix::from_dense({{1.0, 0.0}, {0.5, 0.0}}), {0.0, 0.5},
                      {0.0, 0.0}, 1.0, Direction::maximize);
    CHECK_THROWS_AS(hitting_times(m), NumericalError);
    TransitionModel cyc({"A", "B"}, SparseMatrix::from_dense({{0.0, 1.0}, {1.0, 0.0}}), {0.0, 0.0},
                        {0.0, 0.0}, 1.0, Direction::maximize);
    CHECK_THROWS_AS(hitting_times(cyc), NumericalError);
  }
}

TEST_SUITE("predictions") {
  TEST_CASE("decay prediction is 5 * 0.9^t") {
    const auto p = decay_prediction(onemax_chain::build_lumped(10), 5.0, 50);
    REQUIRE(p.size() == 51);
    CHECK(p[0] == 5.0);
    for (std::size_t t = 0; t <= 50; ++t)
      CHECK(p[t] == doctest::Approx(5.0 * std::pow(0.9, double(t))).epsilon(1e-9));
    CHECK_THROWS_AS(decay_prediction(onemax_chain::build_lumped(3), 0.0, 5), std::invalid_argument);
  }

  TEST_CASE("exact gap over prediction tends to 1 under positive init") {
    std::mt19937_64 gen(17);
    const auto q = oracle::random_positive_substochastic(5, gen, 0.9, 0.99);
    const auto m = model_from(q);
    DistributionVector q0;
    q0.mass.assign(5, 0.2);
    const auto gaps = exact_gap_curve(m, q0, 400);
    const auto pred = decay_prediction(m, gaps[0], 400);
    // Converges to a constant (u.d / q0.d), which is 1 only when q0 is
    // proportional to the eigenvector; check the ratio has settled.
    CHECK(gaps[400] / pred[400] == doctest::Approx(gaps[399] / pred[399]).epsilon(1e-9));

    const auto lumped = onemax_chain::build_lumped(10);
    const auto g2 = exact_gap_curve(lumped, onemax_chain::binomial_init(10, true), 200);
    const auto p2 = decay_prediction(lumped, g2[0], 200);
    CHECK(std::abs(g2[200] / p2[200] - 1.0) < 1e-3);
  }

  TEST_CASE("g-condition on OneMax n=10 with dt=10") {
    const auto g = check_g_condition(onemax_chain::build_lumped(10), 10);
    CHECK(g.holds);
    for (double x : g.g) CHECK(x > 0.0);
  }

  TEST_CASE("g-condition eventually holds") {
    std::mt19937_64 gen(3);
    const auto m = model_from(oracle::random_positive_substochastic(4, gen));
    CHECK(check_g_condition(m, 200).holds);
  }

  TEST_CASE("g-condition single state") {
    for (int dt : {1, 3, 8}) {
      const auto g = check_g_condition(single_state(0.5), dt);
      CHECK(g.holds);
      CHECK(g.g[0] == doctest::Approx(1.0 - std::pow(0.5, dt)));
    }
    CHECK_THROWS_AS(check_g_condition(single_state(0.5), 0), std::invalid_argument);
  }

  TEST_CASE("g-condition sign follows direction") {
    const auto m = model_from({{0.3, 0.2}, {0.1, 0.4}}, Direction::minimize);
    const auto g = check_g_condition(m, 5);
    CHECK(g.holds);
    for (double x : g.g) CHECK(x < 0.0);
  }
}

TEST_SUITE("perron init") {
  TEST_CASE("OneMax n=10 is a point mass on S_1") {
    const auto q = perron_init(onemax_chain::build_lumped(10));
    CHECK(q.generation == 0);
    CHECK(q.mass[0] == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 1; i < q.mass.size(); ++i) CHECK(q.mass[i] < 1e-200);
  }

  TEST_CASE("single state") { CHECK(perron_init(single_state(0.3)).mass == std::vector<double>{1.0}); }

  TEST_CASE("positive 3x3 matches the null-space oracle") {
    std::mt19937_64 gen(123);
    for (int trial = 0; trial < 10; ++trial) {
      const auto q = oracle::random_positive_substochastic(3, gen);
      const double rho = oracle::largest_real_root(q);
      const auto expected = oracle::left_null_vector_3x3(q, rho);
      const auto got = perron_init(model_from(q));
      for (std::size_t i = 0; i < 3; ++i) {
        CHECK(got.mass[i] > 0.0);
        CHECK(got.mass[i] == doctest::Approx(expected[i]).epsilon(1e-7));
      }
    }
  }

  TEST_CASE("rate is constant under Perron init on random positive chains") {
    std::mt19937_64 gen(31);
    for (std::size_t n = 2; n <= 8; ++n) {
      const auto m = model_from(oracle::random_positive_substochastic(n, gen));
      const double target = asymptotic_rate(m);
      const auto r = exact_rate_curve(m, perron_init(m), 100);
      for (std::size_t t = 1; t <= 100; ++t) CHECK(std::abs(*r.values[t] - target) <= 1e-9);
    }
  }
}
