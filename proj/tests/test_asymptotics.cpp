#include <cmath>

#include <doctest.h>

#include "wassim/wim.hpp"

using namespace wassim;

TEST_CASE("g agrees with its closed form") {
  QuadratureSpec spec;
  for (double k : {0.5, 1.0, 2.0, 3.0, 10.0}) {
    CHECK(g_integral(k, spec) == doctest::Approx(g_closed_form(k)).epsilon(1e-10));
  }
  CHECK(g_integral(1.0, spec) == doctest::Approx(M_PI / 2.0).epsilon(1e-10));
  CHECK(g_integral(3.0, spec) ==
        doctest::Approx(3.0 * M_PI / (2.0 * std::sqrt(2.0))).epsilon(1e-10));
  // k -> 0 limit: the integrand collapses to the indicator of [0, 1].
  CHECK(g_integral(1e-3, spec) == doctest::Approx(1.0).epsilon(1e-2));
  CHECK_THROWS_AS(g_integral(-1.0, spec), Error);
}

TEST_CASE("g is increasing in k") {
  QuadratureSpec spec;
  double prev = 0.0;
  for (double k : {0.2, 0.5, 1.0, 2.0, 5.0}) {
    const double cur = g_integral(k, spec);
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("log-squared moment g2") {
  QuadratureSpec spec;
  CHECK(g2_integral(1.0, spec) == doctest::Approx(std::pow(M_PI, 3) / 8.0).epsilon(1e-8));
  // Substituting v -> 1/v shows g2(k) relates integrands symmetrically at
  // k = 1; sanity-check against a loose tolerance at nearby k as well.
  CHECK(g2_integral(1.0, spec) == doctest::Approx(3.87578).epsilon(1e-4));
  CHECK(g2_integral(2.0, spec) > g2_integral(1.0, spec));
}

TEST_CASE("derivative of g at k = 1") {
  QuadratureSpec spec;
  CHECK(g_prime_at_1(spec) == doctest::Approx(M_PI / 4.0).epsilon(1e-7));
}

TEST_CASE("matching point") {
  QuadratureSpec spec;
  // Equal weights, equal scales: the crossover sits at the midpoint.
  CHECK(matching_point(ComponentFamily::Gaussian, 0.5, 0.5, 1.0, 0.1, 1.0) ==
        doctest::Approx(0.5).epsilon(1e-10));
  CHECK(matching_point(ComponentFamily::Laplace, 0.5, 0.5, 1.0, 0.1, 1.0) ==
        doctest::Approx(0.5).epsilon(1e-10));

  // Laplace admits l = d/(k+1) + k sigma/(k+1) * log(k p_i / p_next).
  const double laplace = matching_point(ComponentFamily::Laplace, 0.7, 0.3, 1.0, 0.1, 1.0);
  CHECK(laplace == doctest::Approx(0.5 + 0.05 * std::log(7.0 / 3.0)).epsilon(1e-10));

  // Gaussian equal-scale root vs the exact balance solution
  // l = d/2 + sigma^2 log(p_i/p_next) / d.
  const double sigma = 0.05;
  const double gauss = matching_point(ComponentFamily::Gaussian, 0.7, 0.3, 1.0, sigma, 1.0);
  CHECK(gauss ==
        doctest::Approx(0.5 + sigma * sigma * std::log(7.0 / 3.0)).epsilon(1e-4));

  // The root satisfies the defining density balance.
  const double l = matching_point(ComponentFamily::Gaussian, 0.6, 0.4, 2.0, 0.08, 1.0);
  const double lhs = std::log(0.6) + std::log(component_pdf(ComponentFamily::Gaussian, l,
                                                            0.0, 0.08));
  const double rhs = std::log(0.4) + std::log(component_pdf(ComponentFamily::Gaussian, l,
                                                            1.0, 2.0 * 0.08));
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));

  // Extreme weight imbalance drives the root out of the interior window.
  CHECK_THROWS_AS(matching_point(ComponentFamily::Laplace, 1.0 - 1e-12, 1e-12, 1.0, 0.3,
                                 1.0),
                  DegenerateMatching);
}

TEST_CASE("two-component gap ratio converges to g") {
  QuadratureSpec spec;
  const double r1 =
      delta2_asymptotic_ratio(ComponentFamily::Gaussian, 0.5, 0.5, 1.0, 0.05, 1.0, spec);
  CHECK(std::abs(r1 - M_PI / 2.0) < 0.02 * (M_PI / 2.0));
  const double r2 =
      delta2_asymptotic_ratio(ComponentFamily::Gaussian, 0.5, 0.5, 1.0, 0.03, 1.0, spec);
  CHECK(std::abs(r2 - M_PI / 2.0) < 0.01 * (M_PI / 2.0));
  CHECK(std::abs(r2 - M_PI / 2.0) < std::abs(r1 - M_PI / 2.0));

  const double rl =
      delta2_asymptotic_ratio(ComponentFamily::Laplace, 0.4, 0.6, 1.0, 0.02, 1.0, spec);
  CHECK(std::abs(rl - M_PI / 2.0) < 0.01 * (M_PI / 2.0));

  const double g3 = g_closed_form(3.0);
  const double rk =
      delta2_asymptotic_ratio(ComponentFamily::Gaussian, 0.5, 0.5, 3.0, 0.02, 1.0, spec);
  CHECK(std::abs(rk - g3) < 0.02 * g3);
}

TEST_CASE("perturbation scaling of the diagonal integral") {
  QuadratureSpec spec;
  const double target = g2_integral(1.0, spec);
  const double at20 = perturbation_lemma_check(1.0, 1.0, 20.0, spec);
  CHECK(std::abs(at20 / target - 1.0) < 0.06);
  const double at40 = perturbation_lemma_check(1.0, 1.0, 40.0, spec);
  CHECK(std::abs(at40 / target - 1.0) < std::abs(at20 / target - 1.0));
}
