#include <cmath>
#include <random>

#include <doctest.h>

#include "wassim/mixtures.hpp"
#include "wassim/quadrature.hpp"

using namespace wassim;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

MixtureModel two_gauss(double p1, double sigma, double d = 1.0) {
  return MixtureModel(ComponentFamily::Gaussian, vec({0.0, d}), vec({sigma, sigma}),
                      SimplexPoint(vec({p1, 1.0 - p1})));
}

}  // namespace

TEST_CASE("coordinate changes between simplex and theta") {
  CHECK(simplex_from_theta(ThetaCoords(vec({0.5})))[0] == doctest::Approx(0.5));
  CHECK(simplex_from_theta(ThetaCoords(vec({0.5})))[1] == doctest::Approx(0.5));

  const SimplexPoint p = simplex_from_theta(ThetaCoords(vec({0.8, 0.3})));
  CHECK(p[0] == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(p[2] == doctest::Approx(0.3).epsilon(1e-14));

  CHECK_THROWS_AS(ThetaCoords(vec({0.3, 0.8})), InvalidCoordinates);

  const ThetaCoords th = theta_from_simplex(SimplexPoint(vec({0.2, 0.5, 0.3})));
  CHECK(th[0] == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(th[1] == doctest::Approx(0.3).epsilon(1e-14));

  const ThetaCoords th4 = theta_from_simplex(SimplexPoint(vec({0.25, 0.25, 0.25, 0.25})));
  CHECK(th4[0] == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(th4[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(th4[2] == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("round trip over random interior points") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 6);
    Vector p(n);
    for (int i = 0; i < n; ++i) p(i) = unif(rng);
    p /= p.sum();
    const SimplexPoint back = simplex_from_theta(theta_from_simplex(SimplexPoint(p)));
    for (int i = 0; i < n; ++i) CHECK(back[i] == doctest::Approx(p(i)).epsilon(1e-14));
  }
}

TEST_CASE("component densities") {
  CHECK(component_pdf(ComponentFamily::Gaussian, 0.0, 0.0, 1.0) ==
        doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-12));
  CHECK(component_pdf(ComponentFamily::Laplace, 2.0, 2.0, 0.5) == doctest::Approx(1.0));
  // 5-sigma tail exponent survives in log form.
  const double tail = component_pdf(ComponentFamily::Gaussian, 5.0, 0.0, 1.0) *
                      std::sqrt(2.0 * M_PI);
  CHECK(tail == doctest::Approx(std::exp(-12.5)).epsilon(1e-12));
  CHECK_THROWS_AS(component_pdf(ComponentFamily::Gaussian, 0.0, 0.0, -1.0), InvalidScale);
}

TEST_CASE("component distribution functions") {
  for (ComponentFamily f : {ComponentFamily::Gaussian, ComponentFamily::Laplace}) {
    CHECK(component_cdf(f, 1.5, 1.5, 0.7) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(component_cdf(f, -50.0, 0.0, 1.0) == doctest::Approx(0.0));
    CHECK(component_sf(f, 3.0, 0.0, 0.1) ==
          doctest::Approx(1.0 - component_cdf(f, 3.0, 0.0, 0.1)).epsilon(1e-9));
  }
  CHECK(component_cdf(ComponentFamily::Laplace, std::log(2.0), 0.0, 1.0) ==
        doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("mixture density and distribution") {
  // Near-degenerate mixture tracks its dominant component.
  const MixtureModel near = two_gauss(0.999999, 1.0);
  const double single = component_pdf(ComponentFamily::Gaussian, 0.3, 0.0, 1.0);
  CHECK(mixture_pdf(near, 0.3) == doctest::Approx(single).epsilon(1e-5));

  const MixtureModel sym = two_gauss(0.5, 0.2);
  CHECK(mixture_pdf(sym, 0.5) ==
        doctest::Approx(component_pdf(ComponentFamily::Gaussian, 0.5, 0.0, 0.2))
            .epsilon(1e-12));

  CHECK(mixture_cdf(sym, 1.0 + 12.0 * 0.2) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("mixture cdf differentiates to the pdf") {
  const MixtureModel model(ComponentFamily::Gaussian, vec({0.0, 1.0, 2.5}),
                           vec({0.3, 0.2, 0.4}), SimplexPoint(vec({0.2, 0.5, 0.3})));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(-1.0, 3.5);
  const double h = 1e-6;
  for (int i = 0; i < 100; ++i) {
    const double x = unif(rng);
    const double fd = (mixture_cdf(model, x + h) - mixture_cdf(model, x - h)) / (2.0 * h);
    CHECK(fd == doctest::Approx(mixture_pdf(model, x)).epsilon(1e-6));
  }
}

TEST_CASE("mixture density normalizes") {
  for (ComponentFamily f : {ComponentFamily::Gaussian, ComponentFamily::Laplace}) {
    const MixtureModel model(f, vec({-1.0, 0.5}), vec({0.3, 0.7}),
                             SimplexPoint(vec({0.4, 0.6})));
    QuadratureSpec spec;
    // Radius 30 in scale units: the Laplace tail still carries ~1e-13 mass
    // at radius 30, the Gaussian far less.
    const auto [a, b] = model.support_interval(30.0);
    const double mass =
        integrate([&](double x) { return mixture_pdf(model, x); }, a, b, spec, {-1.0, 0.5});
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("model validation") {
  CHECK_THROWS_AS(MixtureModel(ComponentFamily::Gaussian, vec({0.0, 0.0}), vec({1.0, 1.0}),
                               SimplexPoint(vec({0.5, 0.5}))),
                  InvalidModel);
  CHECK_THROWS_AS(MixtureModel(ComponentFamily::Gaussian, vec({0.0, 1.0}), vec({1.0, -1.0}),
                               SimplexPoint(vec({0.5, 0.5}))),
                  InvalidModel);
  CHECK_THROWS_AS(MixtureModel(ComponentFamily::Gaussian, vec({0.0, 1.0, 2.0}),
                               vec({1.0, 1.0, 1.0}), SimplexPoint(vec({0.5, 0.5}))),
                  InvalidModel);
  CHECK_THROWS_AS(SimplexPoint(vec({0.5, 0.6})), InvalidCoordinates);
  CHECK_THROWS_AS(SimplexPoint(vec({1.0, 0.0})), InvalidCoordinates);
  CHECK(family_from_name("laplace") == ComponentFamily::Laplace);
  CHECK_THROWS_AS(family_from_name("cauchy"), InvalidModel);
}

TEST_CASE("tail-stable cdf differences") {
  const MixtureModel model = two_gauss(0.3, 0.05);
  // Between the means the difference saturates at ~1; far outside it decays
  // through whichever tail representation avoids cancellation.
  CHECK(component_cdf_diff(model, 0, 1, 0.5) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(component_cdf_diff(model, 0, 1, -0.4) > 0.0);
  CHECK(component_cdf_diff(model, 0, 1, 1.4) > 0.0);
  CHECK(component_cdf_diff(model, 0, 1, -0.4) < 1e-12);
}
