#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "kbeta/quadrature.hpp"
#include "kbeta/scalar.hpp"

using namespace kbeta;

namespace {

bool brackets(const QuadResult& r, double truth) {
  return std::abs(r.value - truth) <= r.abs_err + 4e-16 * std::abs(truth);
}

SimplexPoint point(std::vector<double> free) { return SimplexPoint::from_free(free); }

}  // namespace

TEST(SimplexPoint, ImpliedLastCoordinate) {
  const SimplexPoint t = point({0.2, 0.5});
  ASSERT_EQ(t.size(), 3u);
  EXPECT_DOUBLE_EQ(t[2], 0.3);
  EXPECT_THROW(point({0.7, 0.5}), DomainError);
  EXPECT_THROW(point({-0.1, 0.5}), DomainError);
}

TEST(PiOf, Examples) {
  EXPECT_DOUBLE_EQ(pi_of(point({0.5})), 0.25);
  EXPECT_NEAR(pi_of(point({1.0 / 3, 1.0 / 3})), 1.0 / 27, 1e-17);
  EXPECT_EQ(pi_of(point({0.0, 0.4})), 0.0);
  EXPECT_EQ(pi_of(point({0.6, 0.4})), 0.0);
}

TEST(SupPi, Examples) {
  EXPECT_DOUBLE_EQ(sup_pi(2), 0.25);
  EXPECT_DOUBLE_EQ(sup_pi(3), 1.0 / 27);
}

TEST(SupPi, RandomSearchNeverExceedsBound) {
  RngState rng(5);
  for (int n = 2; n <= 6; ++n) {
    const std::vector<double> ones(n, 1.0);
    double best = 0.0;
    for (int i = 0; i < 20000; ++i) {
      best = std::max(best, pi_of(sample_dirichlet(ones, rng)));
    }
    EXPECT_LE(best, sup_pi(n) * (1 + 1e-15)) << n;
    EXPECT_GT(best, 0.5 * sup_pi(n)) << n;
  }
}

TEST(Integrate01, Examples) {
  const auto one = [](double, double) { return 1.0; };
  const QuadResult r1 = integrate_01_weighted(1.0, 1.0, one);
  EXPECT_TRUE(brackets(r1, 1.0));
  const QuadResult r2 = integrate_01_weighted(0.5, 1.0, one);
  EXPECT_TRUE(brackets(r2, 2.0));
  const QuadResult r3 = integrate_01_weighted(2.0, 3.0, one);
  EXPECT_TRUE(brackets(r3, 1.0 / 12));
  EXPECT_EQ(r3.method, QuadMethod::deterministic);
  EXPECT_GT(r3.evals, 0u);
}

TEST(Integrate01, StrongEndpointSingularities) {
  // B(0.05, 0.1)
  const double truth = std::exp(std::lgamma(0.05) + std::lgamma(0.1) - std::lgamma(0.15));
  const QuadResult r =
      integrate_01_weighted(0.05, 0.1, [](double, double) { return 1.0; }, 1e-12);
  EXPECT_NEAR(r.value, truth, 1e-11 * truth);
}

TEST(Integrate01, VerySmallExponents) {
  // the weight mass below x = e^-700 is not negligible here
  for (auto [px, py] : {std::pair{0.658, 0.0324}, {0.087, 0.0289}, {0.01, 0.5}}) {
    const double truth = std::exp(std::lgamma(px) + std::lgamma(py) - std::lgamma(px + py));
    const QuadResult r =
        integrate_01_weighted(px, py, [](double, double) { return 1.0; }, 1e-12);
    EXPECT_NEAR(r.value, truth, 1e-13 * truth) << px << " " << py;
  }
}

TEST(Integrate01, ComplementArgumentIsAccurate) {
  const QuadResult r = integrate_01_weighted(
      1.0, 1.0, [](double x, double xc) { return x + xc; }, 1e-13);
  EXPECT_NEAR(r.value, 1.0, 1e-13);
}

TEST(Integrate01, UnreachableToleranceRaises) {
  // interior singularity: endpoint transforms cannot resolve it
  EXPECT_THROW(integrate_01_weighted(
                   1.0, 1.0,
                   [](double x, double) { return 1.0 / std::sqrt(std::abs(x - 1.0 / 3)); },
                   1e-12),
               NumericError);
}

TEST(IntegrateHalfline, Examples) {
  const KParam k1(1.0);
  const auto e = [](double m) { return std::exp(-m); };
  EXPECT_TRUE(brackets(integrate_halfline(1.0, e, k1), 1.0));
  EXPECT_TRUE(brackets(integrate_halfline(5.0, e, k1), 24.0));
  const QuadResult g =
      integrate_halfline(3.0, [](double m) { return std::exp(-m * m / 2); }, KParam(2.0));
  EXPECT_NEAR(g.value, gamma_k(3.0, KParam(2.0)).value, 1e-9 * g.value);
}

TEST(IntegrateHalfline, SmallPhi) {
  for (double phi : {0.01, 0.03}) {
    const QuadResult r =
        integrate_halfline(phi, [](double m) { return std::exp(-m); }, KParam(1.0), 1e-12);
    EXPECT_NEAR(r.value, std::tgamma(phi), 1e-13 * std::tgamma(phi)) << phi;
  }
}

TEST(IntegrateHalfline, AlgebraicDecay) {
  // int m^(1/2-1) / (1+m) dm = pi
  const QuadResult r = integrate_halfline_pivot(
      0.5, [](double m) { return Estimate{1.0 / (1.0 + m), 0.0}; }, 1.0, 1e-12);
  EXPECT_NEAR(r.value, std::acos(-1.0), 1e-11);
}

TEST(IntegrateSimplexDet, Examples) {
  const auto one = [](const SimplexPoint&) { return 1.0; };
  const std::vector<double> e111{1, 1, 1}, e234{2, 3, 4};
  EXPECT_TRUE(brackets(integrate_simplex_det(e111, one, KParam(1.0)), 0.5));
  EXPECT_TRUE(brackets(integrate_simplex_det(e234, one, KParam(1.0)), 1.0 / 3360));
  const std::vector<double> pq{1.7, 0.6};
  const QuadResult r = integrate_simplex_det(pq, one, KParam(1.3), 1e-12);
  EXPECT_NEAR(r.value, beta_k2(1.7, 0.6, KParam(1.3)).value, 1e-11 * r.value);
}

TEST(IntegrateSimplexDet, FourCoordinates) {
  const std::vector<double> e{1.5, 2.0, 0.7, 1.1};
  const KParam k(0.9);
  const QuadResult r =
      integrate_simplex_det(e, [](const SimplexPoint&) { return 1.0; }, k, 1e-10);
  EXPECT_NEAR(r.value, std::exp(log_beta_k_n(e, k)), 1e-9 * r.value);
}

TEST(IntegrateSimplexDet, DirichletMoment) {
  // E[t1 t2 t3] under Dirichlet(2,3,4) times the normalizer
  const std::vector<double> e{2, 3, 4};
  const QuadResult r = integrate_simplex_det(e, pi_of, KParam(1.0), 1e-12);
  EXPECT_NEAR(r.value, (1.0 / 3360) * 24.0 / 990.0, 1e-12 * r.value);
}

TEST(IntegrateSimplexDet, RejectsBadDimensions) {
  const auto one = [](const SimplexPoint&) { return 1.0; };
  const std::vector<double> e1{1.0}, e5{1, 1, 1, 1, 1};
  EXPECT_THROW(integrate_simplex_det(e1, one, KParam(1.0)), DomainError);
  EXPECT_THROW(integrate_simplex_det(e5, one, KParam(1.0)), DomainError);
}

TEST(McDirichlet, ConstantIntegrandHasZeroError) {
  RngState rng(1);
  const std::vector<double> a{1.0, 2.0};
  const QuadResult r = mc_dirichlet(a, [](const SimplexPoint&) { return 1.0; }, 1000, rng);
  EXPECT_EQ(r.value, 1.0);
  ASSERT_TRUE(r.stderr_mc.has_value());
  EXPECT_EQ(*r.stderr_mc, 0.0);
  EXPECT_EQ(r.method, QuadMethod::monte_carlo);
}

TEST(McDirichlet, UniformMean) {
  RngState rng(2);
  const std::vector<double> a{1.0, 1.0};
  const QuadResult r =
      mc_dirichlet(a, [](const SimplexPoint& t) { return t[0]; }, 100000, rng);
  EXPECT_NEAR(r.value, 0.5, r.abs_err);
  EXPECT_NEAR(r.abs_err, 3.0 * *r.stderr_mc, 1e-18);
}

TEST(McDirichlet, ProductMoment) {
  RngState rng(3);
  const std::vector<double> a{2.0, 3.0, 4.0};
  const QuadResult r = mc_dirichlet(a, pi_of, 100000, rng);
  EXPECT_NEAR(r.value, 24.0 / 990.0, r.abs_err);
}

TEST(McDirichlet, Marginal) {
  RngState rng(4);
  const std::vector<double> a{2.0, 5.0};
  const QuadResult r =
      mc_dirichlet(a, [](const SimplexPoint& t) { return t[0]; }, 100000, rng);
  EXPECT_NEAR(r.value, 2.0 / 7.0, r.abs_err);
}

TEST(McDirichlet, NaNIntegrandRaises) {
  RngState rng(4);
  const std::vector<double> a{2.0, 5.0};
  EXPECT_THROW(
      mc_dirichlet(a, [](const SimplexPoint&) { return std::nan(""); }, 100, rng),
      NumericError);
}

TEST(McDirichlet, SmallShapesDoNotUnderflow) {
  RngState rng(9);
  const std::vector<double> a{0.01, 0.02, 0.01};
  for (int i = 0; i < 1000; ++i) {
    const SimplexPoint t = sample_dirichlet(a, rng);
    double s = 0.0;
    for (std::size_t j = 0; j < t.size(); ++j) s += t[j];
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(RngState, Reproducible) {
  RngState a(42), b(42);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a.engine()(), b.engine()());
  const RngState c = RngState(42).split(3), d = RngState(42).split(3),
                 e = RngState(42).split(4);
  RngState c1 = c, d1 = d, e1 = e;
  const auto x = c1.engine()();
  EXPECT_EQ(x, d1.engine()());
  EXPECT_NE(x, e1.engine()());
}

TEST(IntegrateSimplexMc, MatchesClosedFormForManyCoordinates) {
  RngState rng(6);
  const std::vector<double> e{1, 2, 3, 4, 5};
  const QuadResult r =
      integrate_simplex_mc(e, [](const SimplexPoint&) { return 1.0; }, KParam(1.0), 1000, rng);
  EXPECT_NEAR(r.value, std::exp(log_beta_k_n(e, KParam(1.0))), 1e-12 * r.value);
}

TEST(QuadratureProperty, DeterministicAgreesWithMonteCarlo) {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> uphi(0.3, 4.0), uk(0.5, 2.5), uc(0.1, 2.0);
  RngState rng(31);
  for (int i = 0; i < 50; ++i) {
    const std::size_t n = 2 + (i % 2);
    std::vector<double> e(n);
    for (double& x : e) x = uphi(gen);
    const KParam k(uk(gen));
    const double c = uc(gen);
    const auto g = [c](const SimplexPoint& t) { return std::exp(-c * t[0]) * (1 + t[1]); };
    const QuadResult det = integrate_simplex_det(e, g, k, 1e-10);
    RngState child = rng.split(static_cast<std::uint64_t>(i));
    const QuadResult mc = integrate_simplex_mc(e, g, k, 100000, child);
    // 4 sigma: 50 cases at 3 sigma would false-alarm about 13% of the time
    EXPECT_LE(std::abs(det.value - mc.value), det.abs_err + 4.0 / 3.0 * mc.abs_err) << i;
  }
}

TEST(QuadratureProperty, DeterministicForFixedInputs) {
  const std::vector<double> e{1.2, 2.3, 0.8};
  const auto g = [](const SimplexPoint& t) { return std::cos(t[0] * t[2]); };
  const QuadResult a = integrate_simplex_det(e, g, KParam(1.1));
  const QuadResult b = integrate_simplex_det(e, g, KParam(1.1));
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.abs_err, b.abs_err);
}
