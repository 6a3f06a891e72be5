#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "kslab/mittag_leffler.hpp"
#include "mp_oracle.hpp"

namespace kslab {
namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return out;
}

TEST(MittagLeffler, ExponentialCase) {
  EXPECT_NEAR(mittag_leffler(1.0, 1.0, 1.0), std::exp(1.0), 1e-12 * std::exp(1.0));
  for (double z : {-30.0, -3.0, -0.25, 0.0, 0.5, 4.0, 20.0})
    EXPECT_NEAR(mittag_leffler(1.0, 1.0, z), std::exp(z), 1e-12 * std::max(1.0, std::exp(z))) << z;
}

TEST(MittagLeffler, ZeroArgumentIsLeadingTerm) {
  EXPECT_EQ(mittag_leffler(0.6, 1.0, 0.0), 1.0);
  EXPECT_NEAR(mittag_leffler(0.6, 0.6, 0.0), 1.0 / std::tgamma(0.6), 1e-15);
}

TEST(MittagLeffler, HalfOrderMatchesErfcAndTheOracle) {
  const double expected = std::exp(1.0) * std::erfc(1.0);
  testing::MlOracle oracle(0.5, 1.0);
  EXPECT_NEAR(oracle(-1.0), expected, 1e-15);
  EXPECT_NEAR(mittag_leffler(0.5, 1.0, -1.0), expected, 1e-10 * expected);
  for (double x : {0.1, 2.0, 7.5, 20.0, 25.0}) {
    const double e = std::exp(x * x) * std::erfc(x);
    EXPECT_NEAR(mittag_leffler(0.5, 1.0, -x), e, 1e-10 * e) << x;
  }
}

TEST(MittagLeffler, RejectsBadParameters) {
  EXPECT_THROW(mittag_leffler(0.0, 1.0, -1.0), MittagLefflerError);
  EXPECT_THROW(mittag_leffler(2.5, 1.0, -1.0), MittagLefflerError);
  EXPECT_THROW(mittag_leffler(0.5, 0.0, -1.0), MittagLefflerError);
  EXPECT_THROW(mittag_leffler(0.5, 1.0, -2.0 * kMlMaxArgument), MittagLefflerError);
  EXPECT_THROW(mittag_leffler(0.5, 1.0, std::nan("")), MittagLefflerError);
}

TEST(MittagLeffler, MonotoneDecayOnTheNegativeAxis) {
  for (double beta : {0.1, 0.3, 0.5, 0.8, 0.95}) {
    double prev = 1.0;
    for (double x : log_grid(1e-4, 1e5, 400)) {
      const double e = mittag_leffler(beta, 1.0, -x);
      EXPECT_LE(e, prev) << "beta=" << beta << " x=" << x;
      prev = e;
    }
  }
}

TEST(MittagLeffler, PositiveOnTheNegativeAxis) {
  for (double beta : {0.1, 0.3, 0.5, 0.8, 0.95})
    for (double gamma : {1.0, beta})
      for (double x : log_grid(1e-4, 1e6, 200)) EXPECT_GT(mittag_leffler(beta, gamma, -x), 0.0) << beta << " " << x;
}

TEST(MittagLeffler, DecayEnvelopeDominates) {
  EXPECT_GE(ml_decay_envelope(0.5, 0.0), 1.0);
  testing::MlOracle oracle(0.5, 1.0);
  EXPECT_GE(ml_decay_envelope(0.5, -100.0), oracle(-100.0));
  EXPECT_GE(ml_decay_envelope(1.0, -3.0), std::exp(-3.0));
  for (double beta : {0.2, 0.5, 0.8, 0.99})
    for (double x : log_grid(1e-3, 1e5, 120))
      EXPECT_GE(ml_decay_envelope(beta, -x), std::abs(mittag_leffler(beta, 1.0, -x))) << beta << " " << x;
}

// E_β(wt^β)/e^{w^{1/β}t} increases towards its limit 1/β; the bound used is
// that limit.
TEST(MittagLeffler, GrowthRatioIsBounded) {
  for (double beta : {0.3, 0.5, 0.8}) {
    for (double w : {0.5, 1.0, 2.0}) {
      double prev = 0.0;
      for (int i = 0; i <= 200; ++i) {
        const double t = 5.0 * i / 200;
        const double ratio = mittag_leffler(beta, 1.0, w * std::pow(t, beta)) / std::exp(std::pow(w, 1.0 / beta) * t);
        EXPECT_LE(ratio, (1.0 + 1e-9) / beta) << "beta=" << beta << " w=" << w << " t=" << t;
        EXPECT_GE(ratio, prev - 1e-12) << "beta=" << beta << " w=" << w << " t=" << t;
        prev = ratio;
      }
    }
  }
}

// In |z| ∈ [4,6] every route that accepts the argument must agree.
TEST(MittagLeffler, BranchesAgreeInTheOverlapWindow) {
  for (double beta : {0.3, 0.5, 0.8}) {
    for (double gamma : {1.0, beta}) {
      for (int i = 0; i <= 20; ++i) {
        const double z = -4.0 - 2.0 * i / 20;
        const double quad = ml_detail::laplace_integral(beta, gamma, z);
        const double value = mittag_leffler(beta, gamma, z);
        EXPECT_NEAR(value, quad, 1e-8 * std::abs(quad)) << beta << " " << gamma << " " << z;
        const auto s = ml_detail::series(beta, gamma, z);
        if (s.converged && s.cancellation < 1e6)
          EXPECT_NEAR(s.value, quad, 1e-8 * std::abs(quad)) << "series " << beta << " " << z;
        if (const auto a = ml_detail::asymptotic(beta, gamma, z))
          EXPECT_NEAR(*a, quad, 1e-8 * std::abs(quad)) << "asymptotic " << beta << " " << z;
      }
    }
  }
}

TEST(MittagLeffler, AsymptoticTermsVanishAtGammaPoles) {
  // E_{1/2,1/2}(z) has no 1/z term: Γ(1/2 - 1/2) is a pole.
  EXPECT_EQ(reciprocal_gamma(0.0), 0.0);
  EXPECT_EQ(reciprocal_gamma(-3.0), 0.0);
  EXPECT_NEAR(reciprocal_gamma(-0.5), -1.0 / (2.0 * std::sqrt(std::acos(-1.0))), 1e-15);
  const auto a = ml_detail::asymptotic(0.5, 0.5, -1e4);
  ASSERT_TRUE(a.has_value());
  // leading term -z^{-2}/Γ(-1/2)
  EXPECT_NEAR(*a, 1e-8 / (2.0 * std::sqrt(std::acos(-1.0))), 1e-14);
}

TEST(MittagLeffler, MatchesExtendedPrecisionOracle) {
  for (double beta : {0.3, 0.5, 0.8}) {
    for (double gamma : {1.0, beta}) {
      testing::MlOracle oracle(beta, gamma);
      std::vector<double> zs;
      for (double x : log_grid(1e-3, 50.0, 160)) zs.push_back(-x);
      for (double x : log_grid(1e-3, 5.0, 40)) zs.push_back(x);
      for (double z : zs) {
        const double ref = oracle(z);
        const double tol = oracle.series_regime(z) ? 1e-8 : 1e-6;
        EXPECT_NEAR(mittag_leffler(beta, gamma, z), ref, tol * std::abs(ref)) << beta << " " << gamma << " " << z;
      }
    }
  }
}

TEST(MittagLeffler, PositiveAxisGrowsExponentially) {
  // E_β(x) ~ e^{x^{1/β}}/β for large x.
  for (double beta : {0.5, 0.8}) {
    const double x = 20.0;
    const double lead = std::exp(std::pow(x, 1.0 / beta)) / beta;
    EXPECT_NEAR(mittag_leffler(beta, 1.0, x) / lead, 1.0, 1e-3) << beta;
  }
}

}  // namespace
}  // namespace kslab
