#include <cmath>

#include <doctest.h>

#include "wassim/wim.hpp"

using namespace wassim;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

MixtureModel homogeneous(const Vector& p, double sigma, double d = 1.0,
                         ComponentFamily family = ComponentFamily::Gaussian) {
  const int n = static_cast<int>(p.size());
  Vector means(n), scales(n);
  for (int i = 0; i < n; ++i) {
    means(i) = d * i;
    scales(i) = sigma;
  }
  return MixtureModel(family, means, scales, SimplexPoint(p));
}

}  // namespace

TEST_CASE("limit matrices in closed form") {
  const MetricMatrix f2 = fisher_limit(SimplexPoint(vec({0.5, 0.5})));
  CHECK(f2.entries(0, 0) == doctest::Approx(4.0));

  const MetricMatrix f3u = fisher_limit(SimplexPoint(vec({1.0 / 3, 1.0 / 3, 1.0 / 3})));
  CHECK(f3u.entries(0, 0) == doctest::Approx(6.0));
  CHECK(f3u.entries(0, 1) == doctest::Approx(-3.0));
  CHECK(f3u.entries(1, 0) == doctest::Approx(-3.0));
  CHECK(f3u.entries(1, 1) == doctest::Approx(6.0));

  const MetricMatrix f3 = fisher_limit(SimplexPoint(vec({0.2, 0.5, 0.3})));
  CHECK(f3.entries(0, 0) == doctest::Approx(7.0));
  CHECK(f3.entries(0, 1) == doctest::Approx(-2.0));
  CHECK(f3.entries(1, 1) == doctest::Approx(16.0 / 3.0));

  const MetricMatrix w3u = wasserstein_limit(SimplexPoint(vec({1.0 / 3, 1.0 / 3, 1.0 / 3})));
  CHECK(w3u.entries(0, 0) == doctest::Approx(3.0));
  CHECK(w3u.entries(1, 1) == doctest::Approx(3.0));
  CHECK(w3u.entries(0, 1) == 0.0);

  CHECK(wasserstein_limit(SimplexPoint(vec({0.3, 0.7}))).entries(0, 0) ==
        doctest::Approx(1.0 / std::sqrt(0.21)).epsilon(1e-12));
  const MetricMatrix w3 = wasserstein_limit(SimplexPoint(vec({0.2, 0.5, 0.3})));
  CHECK(w3.entries(0, 0) == doctest::Approx(1.0 / std::sqrt(0.10)).epsilon(1e-12));
  CHECK(w3.entries(1, 1) == doctest::Approx(1.0 / std::sqrt(0.15)).epsilon(1e-12));
}

TEST_CASE("index reversal maps limits to their reversed counterparts") {
  const Vector p = vec({0.1, 0.25, 0.4, 0.25});
  const Vector pr = vec({0.25, 0.4, 0.25, 0.1});
  const MetricMatrix f = fisher_limit(SimplexPoint(p));
  const MetricMatrix fr = fisher_limit(SimplexPoint(pr));
  const MetricMatrix w = wasserstein_limit(SimplexPoint(p));
  const MetricMatrix wr = wasserstein_limit(SimplexPoint(pr));
  const int m = f.dim();
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      CHECK(fr.entries(i, j) ==
            doctest::Approx(f.entries(m - 1 - i, m - 1 - j)).epsilon(1e-14));
      CHECK(wr.entries(i, j) ==
            doctest::Approx(w.entries(m - 1 - i, m - 1 - j)).epsilon(1e-14));
    }
  }
}

TEST_CASE("numeric Fisher matrix approaches the tridiagonal limit") {
  QuadratureSpec spec;
  const MetricMatrix g2 = fisher_matrix_numeric(homogeneous(vec({0.5, 0.5}), 0.01), spec);
  CHECK(g2.entries(0, 0) == doctest::Approx(4.0).epsilon(1e-3));

  const MetricMatrix g3 =
      fisher_matrix_numeric(homogeneous(vec({1.0 / 3, 1.0 / 3, 1.0 / 3}), 0.01), spec);
  CHECK(g3.entries(0, 1) == doctest::Approx(-3.0).epsilon(1e-2));
  CHECK(g3.entries(0, 1) == doctest::Approx(g3.entries(1, 0)).epsilon(1e-9));
}

TEST_CASE("numeric Wasserstein matrix: symmetry, PSD, second-order value") {
  QuadratureSpec spec;
  const MetricMatrix gw = wasserstein_matrix_numeric(homogeneous(vec({0.5, 0.5}), 0.1), spec);
  const LogScaledValue k =
      scaling_factor(ComponentFamily::Gaussian, 0.1, 1.0, ScalingVariant::Homogeneous);
  const double scaled = (gw.log_entry(0, 0) / k).value();
  CHECK(scaled == doctest::Approx(2.0 * (1.0 + 0.01 * M_PI * M_PI / 2.0)).epsilon(0.01));

  const MetricMatrix g3 = wasserstein_matrix_numeric(homogeneous(vec({0.2, 0.5, 0.3}), 0.2),
                                                     spec);
  CHECK(g3.entries(0, 1) == doctest::Approx(g3.entries(1, 0)).epsilon(1e-9));
  const Eigen::SelfAdjointEigenSolver<Matrix> es(g3.entries);
  CHECK(es.eigenvalues().minCoeff() >= -1e-8 * g3.entries.trace());
}

TEST_CASE("reflecting the model anti-transposes the Wasserstein matrix") {
  QuadratureSpec spec;
  const MixtureModel fwd(ComponentFamily::Gaussian, vec({0.0, 1.0, 2.5}),
                         vec({0.1, 0.2, 0.15}), SimplexPoint(vec({0.2, 0.5, 0.3})));
  const MixtureModel rev(ComponentFamily::Gaussian, vec({-2.5, -1.0, 0.0}),
                         vec({0.15, 0.2, 0.1}), SimplexPoint(vec({0.3, 0.5, 0.2})));
  const MetricMatrix a = wasserstein_matrix_numeric(fwd, spec);
  const MetricMatrix b = wasserstein_matrix_numeric(rev, spec);
  const int m = a.dim();
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const LogScaledValue va = a.log_entry(i, j);
      const LogScaledValue vb = b.log_entry(m - 1 - i, m - 1 - j);
      if (va.sign == 0 && vb.sign == 0) continue;
      CHECK(va.log_magnitude == doctest::Approx(vb.log_magnitude).epsilon(1e-8));
      CHECK(va.sign == vb.sign);
    }
  }
}

TEST_CASE("scaling factors in log form") {
  const LogScaledValue kg =
      scaling_factor(ComponentFamily::Gaussian, 0.1, 1.0, ScalingVariant::Homogeneous);
  CHECK(kg.log_magnitude ==
        doctest::Approx(std::log(std::sqrt(2.0 * std::pow(M_PI, 3)) * 1e-3) + 12.5)
            .epsilon(1e-12));

  const LogScaledValue kl =
      scaling_factor(ComponentFamily::Laplace, 0.1, 1.0, ScalingVariant::Homogeneous);
  CHECK(kl.log_magnitude == doctest::Approx(std::log(M_PI * 0.01) + 5.0).epsilon(1e-12));

  // sigma = 0.02 pushes the exponent to 312.5: far beyond double range once
  // exponentiated, still exact in log form.
  const LogScaledValue kt =
      scaling_factor(ComponentFamily::Gaussian, 0.02, 1.0, ScalingVariant::Homogeneous);
  const double prefactor = std::log(std::sqrt(2.0 * std::pow(M_PI, 3)) * 8e-6);
  CHECK(kt.log_magnitude - prefactor == doctest::Approx(312.5).epsilon(1e-12));

  CHECK_THROWS_AS(
      scaling_factor(ComponentFamily::Gaussian, -0.1, 1.0, ScalingVariant::Homogeneous),
      InvalidScale);
}

TEST_CASE("second-order limit") {
  QuadratureSpec spec;
  const MetricMatrix eq = second_order_limit(SimplexPoint(vec({0.5, 0.5})), 0.1, 1.0, spec);
  CHECK(eq.entries(0, 0) ==
        doctest::Approx(2.0 * (1.0 + (M_PI * M_PI / 2.0) * 0.01)).epsilon(1e-7));

  const MetricMatrix tiny =
      second_order_limit(SimplexPoint(vec({0.3, 0.7})), 1e-8, 1.0, spec);
  CHECK(tiny.entries(0, 0) == doctest::Approx(1.0 / std::sqrt(0.21)).epsilon(1e-12));

  const double lr = std::log(7.0 / 3.0);
  const double corr = M_PI * M_PI / 2.0 + 0.5 * lr * lr;
  const MetricMatrix asym =
      second_order_limit(SimplexPoint(vec({0.7, 0.3})), 0.05, 1.0, spec);
  CHECK(asym.entries(0, 0) ==
        doctest::Approx((1.0 + corr * 0.0025) / std::sqrt(0.21)).epsilon(1e-7));

  // Reversing the component order is an isometry, so the diagonal is even in
  // the log weight ratio.
  const MetricMatrix rev =
      second_order_limit(SimplexPoint(vec({0.3, 0.7})), 0.05, 1.0, spec);
  CHECK(rev.entries(0, 0) == doctest::Approx(asym.entries(0, 0)).epsilon(1e-9));

  // High-precision quadrature oracle for the sigma^2 coefficient: at
  // sigma = 0.01 the measured coefficient matches to the next order.
  Vector means(2), scales(2);
  means << 0.0, 1.0;
  scales << 0.01, 0.01;
  const MixtureModel fine(ComponentFamily::Gaussian, means, scales,
                          SimplexPoint(vec({0.7, 0.3})));
  const MetricMatrix gw = wasserstein_matrix_numeric(fine, spec);
  const LogScaledValue k01 =
      scaling_factor(ComponentFamily::Gaussian, 0.01, 1.0, ScalingVariant::Homogeneous);
  const double measured =
      ((gw.log_entry(0, 0) / k01).value() * std::sqrt(0.21) - 1.0) / 1e-4;
  CHECK(measured == doctest::Approx(corr).epsilon(2e-3));

  CHECK_THROWS_AS(second_order_limit(SimplexPoint(vec({0.5, 0.5})), 0.6, 1.0, spec),
                  InvalidModel);
}

TEST_CASE("inhomogeneous limit") {
  QuadratureSpec spec;

  InhomogeneousSpec uniform;
  uniform.gaps = vec({1.0, 1.0});
  uniform.scale_factors = vec({1.0, 1.0, 1.0});
  uniform.sigma = 0.05;
  uniform.reduced_gap = 0.5;
  const MetricMatrix u = inhomogeneous_limit(SimplexPoint(vec({0.2, 0.5, 0.3})), uniform,
                                             spec);
  CHECK(u.entries(0, 0) == doctest::Approx(M_PI / 2.0 / std::sqrt(0.10)).epsilon(1e-9));
  CHECK(u.entries(1, 1) == doctest::Approx(M_PI / 2.0 / std::sqrt(0.15)).epsilon(1e-9));

  InhomogeneousSpec worked;
  worked.gaps = vec({1.0, 2.0});
  worked.scale_factors = vec({1.0, 1.0, 3.0});
  worked.sigma = 0.04;
  worked.reduced_gap = 0.5;
  const MetricMatrix w = inhomogeneous_limit(SimplexPoint(vec({0.2, 0.5, 0.3})), worked,
                                             spec);
  CHECK(w.entries(0, 0) == doctest::Approx(M_PI / 2.0 / std::sqrt(0.10)).epsilon(1e-9));
  const double g3 = M_PI / ((4.0 / 3.0) * std::sin(3.0 * M_PI / 4.0));
  CHECK(w.entries(1, 1) ==
        doctest::Approx(std::pow(3.0, 0.75) * g3 /
                        (std::pow(0.5, 0.25) * std::pow(0.3, 0.75)))
            .epsilon(1e-9));

  InhomogeneousSpec broken = worked;
  broken.gaps = vec({1.0, 1.5});
  CHECK_THROWS_AS(inhomogeneous_limit(SimplexPoint(vec({0.2, 0.5, 0.3})), broken, spec),
                  MatchingViolation);
}

TEST_CASE("extended metric limit blocks") {
  const ExtendedMetric em =
      extended_limit(SimplexPoint(vec({0.5, 0.5})), vec({0.0, 1.0}), 0.02,
                     ComponentFamily::Gaussian);
  CHECK(em.block_mu_mu(0, 0) == doctest::Approx(0.5));
  CHECK(em.block_mu_mu(1, 1) == doctest::Approx(0.5));
  CHECK(em.block_mu_mu(0, 1) == 0.0);
  CHECK(em.block_theta_mu(0, 0) == doctest::Approx(0.5));
  CHECK(em.block_theta_mu(0, 1) == doctest::Approx(0.5));
  CHECK(em.block_theta_theta(0, 0) ==
        doctest::Approx(wasserstein_limit(SimplexPoint(vec({0.5, 0.5}))).entries(0, 0)));

  const Matrix full = rescaled_block_matrix(em);
  CHECK(full.rows() == 3);
  // K^{-1/2} ~ e^{-151} at sigma = 0.02: the cross block is numerically gone.
  CHECK(full.topRightCorner(1, 2).cwiseAbs().maxCoeff() < 1e-40);
  CHECK((full - full.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("score-change identity between Fisher and Wasserstein metrics") {
  QuadratureSpec spec;
  CHECK(wig_relation_check(homogeneous(vec({0.3, 0.7}), 0.2), spec) < 1e-7);
  CHECK(wig_relation_check(homogeneous(vec({0.2, 0.5, 0.3}), 0.1), spec) < 1e-6);

  // In the small-sigma limit the mu-block collapses to diag(p) and the
  // bidiagonal product reproduces the tridiagonal Fisher limit exactly.
  const Vector p = vec({0.2, 0.5, 0.3});
  const Matrix sigma = wig_sigma_matrix(SimplexPoint(p));
  const Matrix product = sigma * p.asDiagonal() * sigma.transpose();
  const Matrix limit = fisher_limit(SimplexPoint(p)).entries;
  CHECK((product - limit).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("diagonal reduction integral matches plain quadrature at moderate sigma") {
  QuadratureSpec spec;
  const MixtureModel model = homogeneous(vec({0.4, 0.6}), 0.3);
  const LogScaledValue ii = diagonal_reduction_integral(model, 0, spec);
  const double direct = integrate(
      [&](double x) {
        return 1.0 / (0.4 * component_pdf(ComponentFamily::Gaussian, x, 0.0, 0.3) +
                      0.6 * component_pdf(ComponentFamily::Gaussian, x, 1.0, 0.3));
      },
      0.0, 1.0, spec, {0.5});
  CHECK(ii.value() == doctest::Approx(direct).epsilon(1e-9));
}

TEST_CASE("provenance names round trip") {
  for (Provenance p : {Provenance::NumericFisher, Provenance::NumericWasserstein,
                       Provenance::FisherLimit, Provenance::WassersteinLimit,
                       Provenance::SecondOrderLimit, Provenance::InhomogeneousLimit}) {
    CHECK(provenance_from_name(provenance_name(p)) == p);
  }
  CHECK_THROWS_AS(provenance_from_name("nonsense"), InvalidModel);
}
