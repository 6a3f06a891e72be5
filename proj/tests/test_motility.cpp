#include <cmath>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "kslab/motility.hpp"

namespace kslab {
namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return out;
}

std::vector<MotilityFunction> builtins() {
  return {make_power_law(0.5), make_power_law(1.0), make_power_law(1.5), make_exponential(1.0),
          make_exponential(0.3), make_shifted_power(0.5), make_shifted_power(2.0), make_constant(0.7)};
}

TEST(Motility, PowerLawValues) {
  EXPECT_DOUBLE_EQ(make_power_law(0.5)(4.0), 0.5);
  EXPECT_DOUBLE_EQ(make_power_law(1.0).deriv(2.0), -0.25);
  EXPECT_DOUBLE_EQ(make_power_law(1.0).deriv2(2.0), 0.25);
  EXPECT_DOUBLE_EQ(*make_power_law(0.5).l0(), 3.0);
  EXPECT_THROW(make_power_law(0.0), std::invalid_argument);
  EXPECT_THROW(make_power_law(-1.0), std::invalid_argument);
}

TEST(Motility, OtherFamilies) {
  EXPECT_DOUBLE_EQ(make_exponential(2.0)(0.5), std::exp(-1.0));
  EXPECT_DOUBLE_EQ(*make_exponential(2.0).l0(), 1.0);
  EXPECT_DOUBLE_EQ(make_shifted_power(0.5)(3.0), 0.5);
  EXPECT_DOUBLE_EQ(make_constant(0.7)(123.0), 0.7);
  EXPECT_EQ(make_constant(0.7).deriv(1.0), 0.0);
  EXPECT_FALSE(make_constant(0.7).l0().has_value());
  EXPECT_THROW(make_exponential(0.0), std::invalid_argument);
  EXPECT_THROW(make_shifted_power(0.0), std::invalid_argument);
  EXPECT_THROW(make_constant(0.0), std::invalid_argument);
}

TEST(Motility, DerivativesMatchFiniteDifferences) {
  for (const auto& mf : builtins()) {
    for (double s : log_grid(1e-2, 1e2, 60)) {
      const double h = 1e-4 * s;
      const double d1 = (mf(s + h) - mf(s - h)) / (2 * h);
      const double h2 = 1e-3 * s;
      const double d2 = (mf(s + h2) - 2 * mf(s) + mf(s - h2)) / (h2 * h2);
      const double scale1 = std::max(std::abs(mf.deriv(s)), 1e-12 * mf(s) / s);
      EXPECT_NEAR(mf.deriv(s), d1, 1e-6 * scale1 + 1e-14) << mf.describe() << " s=" << s;
      const double scale2 = std::max(std::abs(mf.deriv2(s)), 1e-12 * mf(s) / (s * s));
      EXPECT_NEAR(mf.deriv2(s), d2, 1e-4 * scale2 + 1e-10) << mf.describe() << " s=" << s;
    }
  }
}

TEST(Motility, CustomFallsBackToFiniteDifferences) {
  const auto mf = make_custom([](double s) { return 1.0 / (1.0 + s * s); });
  for (double s : {0.3, 1.0, 4.0}) {
    const double d = -2.0 * s / std::pow(1.0 + s * s, 2);
    const double d2 = (6.0 * s * s - 2.0) / std::pow(1.0 + s * s, 3);
    EXPECT_NEAR(mf.deriv(s), d, 1e-6 * std::abs(d));
    EXPECT_NEAR(mf.deriv2(s), d2, 1e-4 * std::abs(d2) + 1e-8);
  }
  EXPECT_EQ(mf.family(), MotilityFamily::Custom);
}

TEST(Motility, NonincreasingOnTheGrid) {
  for (const auto& mf : builtins())
    for (double s : log_grid(1e-3, 1e3, 500)) EXPECT_LE(mf.deriv(s), 1e-12) << mf.describe() << " s=" << s;
}

TEST(Hypotheses, PowerLawHalfHoldsEverywhere) {
  const auto r = check_hypotheses(make_power_law(0.5), {0.1, 100.0}, 3);
  EXPECT_TRUE(r.h0.holds);
  EXPECT_TRUE(r.h1.holds);
  EXPECT_TRUE(r.h2.holds);
  EXPECT_TRUE(r.h3.holds);
  EXPECT_TRUE(r.all_hold());
  ASSERT_TRUE(r.l0.has_value());
  EXPECT_DOUBLE_EQ(*r.l0, 3.0);
  EXPECT_DOUBLE_EQ(r.l0_required, 1.25);
  for (int n = 1; n <= 9; ++n) EXPECT_TRUE(check_hypotheses(make_power_law(0.5), {1e-3, 1e3}, n).all_hold()) << n;
  // l0 = 3 is exactly the requirement at n = 10
  EXPECT_FALSE(check_hypotheses(make_power_law(0.5), {1e-3, 1e3}, 10).h3.holds);
}

TEST(Hypotheses, ExponentialViolatesH1WithWitness) {
  const auto r = check_hypotheses(make_exponential(1.0), {0.1, 10.0}, 3);
  EXPECT_TRUE(r.h0.holds);
  EXPECT_FALSE(r.h1.holds);
  ASSERT_TRUE(r.h1.witness.has_value());
  // ρ + sρ' = (1-s)e^{-s} turns negative just past s = 1
  EXPECT_GT(*r.h1.witness, 1.0);
  EXPECT_LT(*r.h1.witness, 1.01);
  EXPECT_LT(*r.h1.witness_value, 0.0);
  EXPECT_NEAR(*r.h1.witness_value, (1.0 - *r.h1.witness) * std::exp(-*r.h1.witness), 1e-15);
  // s = 2 is a violation point too
  const auto mf = make_exponential(1.0);
  EXPECT_LT(mf(2.0) + 2.0 * mf.deriv(2.0), 0.0);
}

TEST(Hypotheses, ExponentialFailsH2OverWideRange) {
  const auto r = check_hypotheses(make_exponential(1.0), {1e-3, 1e3}, 3);
  EXPECT_FALSE(r.h1.holds);
  EXPECT_FALSE(r.h2.holds);
  EXPECT_FALSE(r.h2_exponent.has_value());
}

TEST(Hypotheses, SteepPowerLawFailsH1Only) {
  const auto r = check_hypotheses(make_power_law(1.5), {1e-3, 1e3}, 3);
  EXPECT_TRUE(r.h0.holds);
  EXPECT_FALSE(r.h1.holds);
  EXPECT_TRUE(r.h2.holds);
  EXPECT_TRUE(r.h3.holds);
  EXPECT_NEAR(*r.l0, 5.0 / 3.0, 1e-15);
}

TEST(Hypotheses, H1AgreesWithMonotonicityOfSRho) {
  for (const auto& mf : builtins()) {
    const auto r = check_hypotheses(mf, {1e-3, 1e3}, 3, 4000);
    bool nondecreasing = true;
    const auto grid = log_grid(1e-3, 1e3, 4000);
    for (std::size_t i = 1; i < grid.size(); ++i)
      if (grid[i] * mf(grid[i]) < grid[i - 1] * mf(grid[i - 1]) * (1.0 - 1e-12)) nondecreasing = false;
    EXPECT_EQ(r.h1.holds, nondecreasing) << mf.describe();
    EXPECT_EQ(r.s_rho_nondecreasing, nondecreasing) << mf.describe();
  }
}

TEST(Hypotheses, ExtendingTheRangeNeverFlipsAFailureToAPass) {
  for (const auto& mf : builtins()) {
    const auto narrow = check_hypotheses(mf, {0.01, 10.0}, 3, 2000);
    const auto wide = check_hypotheses(mf, {0.01, 1000.0}, 3, 6000);
    if (!narrow.h0.holds) EXPECT_FALSE(wide.h0.holds) << mf.describe();
    if (!narrow.h1.holds) EXPECT_FALSE(wide.h1.holds) << mf.describe();
    if (!narrow.h3.holds) EXPECT_FALSE(wide.h3.holds) << mf.describe();
  }
}

TEST(Hypotheses, RejectsBadRanges) {
  EXPECT_THROW(check_hypotheses(make_power_law(0.5), {0.0, 1.0}, 1), std::invalid_argument);
  EXPECT_THROW(check_hypotheses(make_power_law(0.5), {2.0, 1.0}, 1), std::invalid_argument);
  EXPECT_THROW(check_hypotheses(make_power_law(0.5), {0.1, 1.0}, 0), std::invalid_argument);
  const auto bad = make_custom([](double s) { return std::log(s - 0.5); });
  EXPECT_THROW(check_hypotheses(bad, {0.1, 1.0}, 1), std::domain_error);
}

TEST(UpperBound, PowerLaw) {
  const auto ub = upper_bound_decomposition(make_power_law(0.5), 1.0);
  EXPECT_DOUBLE_EQ(ub.k, 0.5);
  EXPECT_LE(ub.b, 1.0);
  EXPECT_LE(ub.max_excess, 0.0);
}

TEST(UpperBound, ShiftedPowerFindsFiniteB) {
  const auto ub = upper_bound_decomposition(make_shifted_power(0.5), 1.0);
  EXPECT_TRUE(std::isfinite(ub.b));
  EXPECT_GT(ub.b, 0.0);
  EXPECT_LE(ub.max_excess, 0.0);
  // independent check of the inequality on the verified range
  const auto mf = make_shifted_power(0.5);
  for (double s : log_grid(1e-3, ub.s_max, 300))
    EXPECT_LE(1.0 / mf(s), ub.b * std::pow(s, ub.k) + 1.0 / mf(1.0) + 1e-12) << s;
}

TEST(UpperBound, ExponentialHasNoPolynomialBound) {
  EXPECT_THROW(upper_bound_decomposition(make_exponential(1.0), 1.0), std::domain_error);
  EXPECT_THROW(upper_bound_decomposition(make_power_law(0.5), 0.0), std::invalid_argument);
}

}  // namespace
}  // namespace kslab
