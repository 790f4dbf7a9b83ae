#include <gtest/gtest.h>

#include <cmath>

#include "tlsq/quadrature.hpp"

namespace tlsq {
namespace {

TEST(GaussLegendre, WeightsSumToTwoAndNodesSymmetric) {
  for (std::size_t n : {1u, 2u, 3u, 7u, 16u, 64u, 256u}) {
    const auto rule = gauss_legendre(n);
    ASSERT_EQ(rule.size(), n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sum += rule.weights[i];
      EXPECT_NEAR(rule.nodes[i], -rule.nodes[n - 1 - i], 1e-15);
      EXPECT_GT(rule.weights[i], 0.0);
      if (i > 0) {
        EXPECT_LT(rule.nodes[i - 1], rule.nodes[i]);
      }
    }
    EXPECT_NEAR(sum, 2.0, 1e-13) << n;
  }
}

TEST(GaussLegendre, ExactForPolynomialsUpToDegree2nMinus1) {
  for (std::size_t n : {2u, 5u, 10u}) {
    const auto rule = gauss_legendre(n);
    for (std::size_t k = 0; k < 2 * n; ++k) {
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) sum += rule.weights[i] * std::pow(rule.nodes[i], double(k));
      const double exact = (k % 2 == 1) ? 0.0 : 2.0 / double(k + 1);
      EXPECT_NEAR(sum, exact, 1e-13) << "n=" << n << " k=" << k;
    }
  }
}

TEST(GaussLegendre, KnownThreePointRule) {
  const auto rule = gauss_legendre(3);
  EXPECT_NEAR(rule.nodes[2], std::sqrt(0.6), 1e-15);
  EXPECT_NEAR(rule.weights[0], 5.0 / 9.0, 1e-15);
  EXPECT_NEAR(rule.weights[1], 8.0 / 9.0, 1e-15);
  EXPECT_THROW(gauss_legendre(0), DomainError);
}

TEST(CompositeGaussLegendre, SmoothIntegrand) {
  const auto rule = composite_gauss_legendre(0.0, 3.0, 4, 16);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) sum += rule.weights[i] * std::exp(-rule.nodes[i]);
  EXPECT_NEAR(sum, 1.0 - std::exp(-3.0), 1e-14);
  EXPECT_THROW(composite_gauss_legendre(0.0, 1.0, 0, 4), DomainError);
}

}  // namespace
}  // namespace tlsq
