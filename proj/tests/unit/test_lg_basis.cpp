#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include <gtest/gtest.h>

#include "fracoam/lg_basis.hpp"

using namespace fracoam;

namespace {

// L_p^a(x) = sum_k (-1)^k C(p+a, p-k) x^k / k!
long double laguerre_series(int p, int a, long double x) {
  long double sum = 0.0L;
  for (int k = 0; k <= p; ++k) {
    const long double binom =
        std::exp(std::lgamma(static_cast<long double>(p + a + 1)) - std::lgamma(static_cast<long double>(p - k + 1)) -
                 std::lgamma(static_cast<long double>(a + k + 1)));
    const long double term = binom * std::pow(x, k) / std::tgamma(static_cast<long double>(k + 1));
    sum += (k % 2 ? -term : term);
  }
  return sum;
}

// Composite Simpson over t = 2 r^2 / w^2: the mode power is
// integral of R^2 r dr = (w^2/4) integral of R^2 dt.
double radial_power_simpson(int abs_l, int p, double w) {
  const int n = 200000;
  const double t_max = 40.0 + 8.0 * (abs_l + 2 * p);
  const double h = t_max / n;
  double acc = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double t = k * h;
    const double r = w * std::sqrt(t / 2.0);
    const double v = lg_radial(abs_l, p, w, r);
    const double c = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    acc += c * v * v;
  }
  return acc * h / 3.0 * w * w / 4.0;
}

}  // namespace

TEST(Laguerre, MatchesExplicitSeries) {
  for (int p = 0; p <= 12; ++p)
    for (int a = 0; a <= 10; a += 2)
      for (double x : {0.0, 0.3, 1.7, 4.0, 9.5}) {
        const double expect = static_cast<double>(laguerre_series(p, a, x));
        EXPECT_NEAR(assoc_laguerre(p, a, x), expect, 1e-10 * std::max(1.0, std::abs(expect)))
            << "p=" << p << " a=" << a << " x=" << x;
      }
}

TEST(Laguerre, LowOrderClosedForms) {
  const double x = 2.3;
  EXPECT_DOUBLE_EQ(assoc_laguerre(0, 4, x), 1.0);
  EXPECT_NEAR(assoc_laguerre(1, 3, x), 4.0 - x, 1e-15);
  EXPECT_NEAR(assoc_laguerre(2, 1, x), (x * x - 6.0 * x + 6.0) / 2.0, 1e-14);
}

TEST(Laguerre, ScaledValueStaysFiniteAtHighDegree) {
  // L_600^600(0.5) is of order 1e360, beyond double range
  const int p = 600, a = 600;
  const double x = 0.5;
  const auto v = assoc_laguerre_scaled(p, a, x);
  EXPECT_TRUE(std::isfinite(v.mantissa));
  EXPECT_GT(v.log_scale, 0.0);
  long double prev = 1.0L;
  long double cur = 1.0L + a - x;
  for (int k = 1; k < p; ++k) {
    const long double next = ((2.0L * k + 1 + a - x) * cur - (k + static_cast<long double>(a)) * prev) / (k + 1.0L);
    prev = cur;
    cur = next;
  }
  const double log_ref = static_cast<double>(std::log(std::abs(cur)));
  EXPECT_GT(log_ref, std::log(std::numeric_limits<double>::max()));
  EXPECT_NEAR(std::log(std::abs(v.mantissa)) + v.log_scale, log_ref, 1e-12 * log_ref);
  EXPECT_EQ(std::signbit(v.mantissa), std::signbit(static_cast<double>(cur)));
}

TEST(LGMode, RadialProfilesAreNormalized) {
  for (int a : {0, 1, 3, 7})
    for (int p : {0, 1, 4, 10}) EXPECT_NEAR(radial_power_simpson(a, p, 1.3), 1.0, 1e-9) << a << "," << p;
}

TEST(LGMode, HighOrderNormalizationDoesNotOverflow) {
  EXPECT_NEAR(radial_power_simpson(60, 40, 1.0), 1.0, 1e-8);
}

TEST(LGMode, LowOrderClosedForms) {
  const double w = 0.7;
  const BasisParams bp{w, 813e-9};
  const double c = std::sqrt(2.0 / std::numbers::pi) / w;
  for (double r : {0.0, 0.2, 0.7, 1.5}) {
    const double g = std::exp(-r * r / (w * w));
    EXPECT_NEAR(lg_eval({0, 0}, bp, r, 0.4).real(), c * g, 1e-14);
    EXPECT_NEAR(lg_eval({0, 1}, bp, r, 0.0).real(), c * (1.0 - 2.0 * r * r / (w * w)) * g, 1e-14);
    EXPECT_NEAR(std::abs(lg_eval({1, 0}, bp, r, 0.0)), c * std::sqrt(2.0) * r / w * g, 1e-14);
  }
}

TEST(LGMode, AzimuthalPhase) {
  const BasisParams bp{1.0, 813e-9};
  for (int l : {-4, -1, 2, 5}) {
    const auto u0 = lg_eval({l, 1}, bp, 0.8, 0.0);
    const auto u = lg_eval({l, 1}, bp, 0.8, 1.1);
    const auto ratio = u / u0;
    EXPECT_NEAR(ratio.real(), std::cos(l * 1.1), 1e-13);
    EXPECT_NEAR(ratio.imag(), std::sin(l * 1.1), 1e-13);
  }
}

TEST(LGMode, VanishesOnAxisForNonzeroL) {
  EXPECT_EQ(std::abs(lg_eval({3, 2}, {1.0, 1.0}, 0.0, 0.0)), 0.0);
}

TEST(LGMode, RejectsInvalidArguments) {
  EXPECT_THROW((void)lg_eval({1, -1}, {1.0, 1.0}, 0.5, 0.0), std::invalid_argument);
  EXPECT_THROW((void)lg_eval({1, 0}, {1.0, 1.0}, -0.5, 0.0), std::invalid_argument);
  EXPECT_THROW((BasisParams{0.0, 1.0}.validate()), std::invalid_argument);
  EXPECT_THROW((BasisParams{1.0, -1.0}.validate()), std::invalid_argument);
}

TEST(ModeList, CountsAndOrdering) {
  EXPECT_EQ(mode_count(0), 1);
  EXPECT_EQ(mode_count(7), 36);
  EXPECT_EQ(mode_count(20), 231);
  EXPECT_EQ(mode_count(-1), 0);
  EXPECT_TRUE(modes_up_to_order(-1).empty());

  const auto modes = modes_up_to_order(20);
  ASSERT_EQ(modes.size(), 231u);
  std::set<LGIndex> seen(modes.begin(), modes.end());
  EXPECT_EQ(seen.size(), modes.size());
  for (std::size_t k = 1; k < modes.size(); ++k) {
    const auto& a = modes[k - 1];
    const auto& b = modes[k];
    EXPECT_TRUE(a.order() < b.order() || (a.order() == b.order() && a.l < b.l));
  }
  for (const auto& m : modes) {
    EXPECT_GE(m.p, 0);
    EXPECT_LE(m.order(), 20);
  }
  const auto small = modes_up_to_order(7);
  EXPECT_TRUE(std::equal(small.begin(), small.end(), modes.begin()));
}

TEST(ModeList, HermiteLabelling) {
  EXPECT_EQ(lg_index_from_nm(0, 0), (LGIndex{0, 0}));
  EXPECT_EQ(lg_index_from_nm(3, 1), (LGIndex{2, 1}));
  EXPECT_EQ(lg_index_from_nm(1, 4), (LGIndex{-3, 1}));
  EXPECT_EQ(lg_index_from_nm(2, 5).order(), 7);
}
