#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace brease;
using namespace brease::test;

TEST(Summarize, AspirinRiskRatio) {
  const auto s = summarize(exact_sample(kAspirin, default_prior(), 100000, 81), Estimand::risk_ratio);
  EXPECT_NEAR(s.median, 0.44, 0.01);
  EXPECT_NEAR(s.cri_low, 0.20, 0.01);
  EXPECT_NEAR(s.cri_high, 0.96, 0.01);
  EXPECT_EQ(s.n_draws, 100000u);
  EXPECT_EQ(s.level, 0.95);
}

TEST(Summarize, ConstantDraws) {
  DrawSet d;
  d.draws.assign(500, BreaseParams{0.2, 0.5, 0.1});
  const auto s = summarize(d, Estimand::theta1);
  EXPECT_DOUBLE_EQ(s.median, d.draws[0].theta1());
  EXPECT_EQ(s.cri_low, s.cri_high);
}

TEST(Summarize, QuantileType7) {
  EXPECT_DOUBLE_EQ(quantile_sorted({1, 2, 3, 4}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile_sorted({1, 2, 3, 4}, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile_sorted({1, 2, 3, 4}, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(quantile_sorted({0, 10}, 0.25), 2.5);
}

TEST(Summarize, Rejects) {
  DrawSet d;
  d.draws.assign(50, BreaseParams{});
  EXPECT_THROW(summarize(d, Estimand::theta0), DomainError);
  d.draws.assign(200, BreaseParams{});
  EXPECT_THROW(summarize(d, Estimand::theta0, 1.0), DomainError);
  d.draws[3].theta0 = 0.0;
  EXPECT_THROW(summarize(d, Estimand::risk_ratio), DomainError);
}

TEST(Summarize, EstimandValues) {
  const BreaseParams p{0.4, 0.5, 0.1};
  EXPECT_NEAR(estimand_value(p, Estimand::theta1), 0.26, 1e-15);
  EXPECT_NEAR(estimand_value(p, Estimand::risk_ratio), 0.65, 1e-15);
  EXPECT_NEAR(estimand_value(p, Estimand::vaccine_efficacy), 0.35, 1e-15);
  EXPECT_NEAR(estimand_value(p, Estimand::risk_difference), -0.14, 1e-15);
  EXPECT_THROW(estimand_value(0.1, 0.2, Estimand::eta_e), DomainError);
}

TEST(Ks, TwoSampleAndOneSample) {
  EXPECT_DOUBLE_EQ(ks_two_sample({1, 2, 3}, {1, 2, 3}), 0.0);
  EXPECT_DOUBLE_EQ(ks_two_sample({1, 2}, {3, 4}), 1.0);
  EXPECT_NEAR(ks_two_sample({1, 2, 3, 4}, {3, 4, 5, 6}), 0.5, 1e-15);
  EXPECT_NEAR(ks_one_sample({0.5}, [](double x) { return x; }), 0.5, 1e-15);
  EXPECT_GT(ks_p_value(0.001, 1000), 0.99);
  EXPECT_LT(ks_p_value(0.2, 1000), 1e-10);
}

TEST(HistogramTv, Examples) {
  auto uniform = [](double a, double b) { return b - a; };
  EXPECT_NEAR(histogram_tv({0.1, 0.3, 0.6, 0.8}, 0.0, 1.0, 4, uniform), 0.0, 1e-15);
  EXPECT_NEAR(histogram_tv({0.1, 0.1, 0.1, 0.1}, 0.0, 1.0, 4, uniform), 0.75, 1e-15);
  // Out-of-range values count against the histogram.
  EXPECT_NEAR(histogram_tv({0.1, 2.0}, 0.0, 1.0, 1, uniform), 0.5, 1e-15);
}

TEST(SensitivityGrid, AspirinAnchors) {
  const auto base = default_prior();
  const GridAxis mue{PriorField::mue, {0.5}};
  const GridAxis mus{PriorField::mus, {0.01, 0.5}};
  const auto g = sensitivity_grid(kAspirin, base, mue, mus);
  ASSERT_EQ(g.points.size(), 2u);
  EXPECT_NEAR(g.points[0].bf, 13.45, 13.45 * 0.02);
  EXPECT_NEAR(1.0 / g.points[1].bf, 2.66, 2.66 * 0.02);
  EXPECT_EQ(g.points[0].band, "strong_for_num");
  EXPECT_EQ(g.points[1].band, "weak_for_den");
}

TEST(SensitivityGrid, CovidAlwaysFavoursEffect) {
  GridAxis mue{PriorField::mue, {}}, mus{PriorField::mus, {}};
  for (int i = 1; i <= 5; ++i) {
    mue.values.push_back(0.19 * i);
    mus.values.push_back(0.19 * i);
  }
  const auto g = sensitivity_grid(kCovid, default_prior(), mue, mus);
  double lo = g.points[0].log_bf;
  for (const auto& p : g.points) lo = std::min(lo, p.log_bf);
  // Posterior probability of H0 at equal prior odds.
  EXPECT_LT(1.0 / (1.0 + std::exp(lo)), 1e-10);
}

TEST(SensitivityGrid, OrderAndErrors) {
  const GridAxis a{PriorField::ne, {1.0, 2.0}};
  const GridAxis b{PriorField::ns, {1.0, 3.0, 5.0}};
  const auto g = sensitivity_grid({2, 5, 3, 6}, default_prior(), a, b, Model::M_minus_mono, Model::M0);
  ASSERT_EQ(g.points.size(), 6u);
  EXPECT_EQ(g.points[1].value1, 1.0);
  EXPECT_EQ(g.points[1].value2, 3.0);
  EXPECT_EQ(g.points[3].value1, 2.0);
  EXPECT_THROW(sensitivity_grid({2, 5, 3, 6}, default_prior(), {PriorField::mue, {}}, b), DomainError);
  EXPECT_THROW(sensitivity_grid({2, 5, 3, 6}, default_prior(), {PriorField::mue, {1.5}}, b), DomainError);
  EXPECT_THROW(sensitivity_grid({2, 5, 3, 6}, default_prior(), a, b, Model::IB_H1), DomainError);
  EXPECT_THROW(prior_field_from_string("mu9"), DomainError);
}
