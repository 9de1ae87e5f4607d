#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace brease;
using namespace brease::test;

TEST(ExactSampler, EmptyDataReproducesPrior) {
  const auto prior = default_prior();
  const auto d = exact_sample({0, 0, 0, 0}, prior, 100000, 31);
  const auto t0 = moments(theta0s(d));
  const auto ee = moments(column(d, [](const BreaseParams& p) { return p.eta_e; }));
  const auto es = moments(column(d, [](const BreaseParams& p) { return p.eta_s; }));
  EXPECT_NEAR(t0.mean, 0.5, 3.0 * t0.se);
  EXPECT_NEAR(ee.mean, 0.3, 3.0 * ee.se);
  EXPECT_NEAR(es.mean, 0.3, 3.0 * es.se);
  EXPECT_NEAR(t0.var, prior.theta0().variance(), 2e-3);
}

TEST(ExactSampler, PathologicalMeanMatchesMixture) {
  const ExactSampler s(kPathological, kPathologicalPrior);
  const auto d = s.sample(100000, 32);
  const auto m = moments(theta0s(d));
  EXPECT_NEAR(m.mean, analytic_posterior_moment(s.table(), Functional::theta0), 3.0 * m.se);
}

TEST(ExactSampler, CovidVaccineEfficacy) {
  const auto d = exact_sample(kCovid, default_prior(), 100000, 33);
  const auto s = summarize(d, Estimand::vaccine_efficacy);
  EXPECT_GE(s.median, 0.94 - 0.005);
  EXPECT_LE(s.median, 0.95 + 0.005);
  EXPECT_NEAR(s.cri_low, 0.90, 0.01);
  EXPECT_NEAR(s.cri_high, 0.97, 0.01);
}

TEST(ExactSampler, DeterministicForSeed) {
  const auto a = exact_sample({3, 10, 4, 10}, default_prior(), 1000, 5);
  const auto b = exact_sample({3, 10, 4, 10}, default_prior(), 1000, 5);
  for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(a.draws[i].theta0, b.draws[i].theta0);
  EXPECT_EQ(a.meta.seed, 5u);
  EXPECT_THROW(exact_sample({3, 10, 4, 10}, default_prior(), 0, 5), DomainError);
}

TEST(GibbsSampler, PathologicalAgreesWithExact) {
  // The chain mixes slowly here (lag-10 autocorrelation near 0.5), so every
  // tenth sweep is kept to get 5e4 nearly independent draws.
  const auto ex = exact_sample(kPathological, kPathologicalPrior, 50000, 34);
  const auto gb = gibbs_sample(kPathological, kPathologicalPrior, 501000, 1000, BreaseParams{}, 35);
  EXPECT_LE(ks_two_sample(theta0s(ex), thin(theta0s(gb), 10)), 0.01);
}

TEST(GibbsSampler, AspirinRiskRatioMedian) {
  const auto ex = exact_sample(kAspirin, default_prior(), 100000, 36);
  const auto gb = gibbs_sample(kAspirin, default_prior(), 201000, 1000, BreaseParams{}, 37);
  EXPECT_NEAR(summarize(gb, Estimand::risk_ratio).median, summarize(ex, Estimand::risk_ratio).median, 0.01);
}

TEST(GibbsSampler, EmptyDataStationaryMoments) {
  const auto d = gibbs_sample({0, 0, 0, 0}, default_prior(), 101000, 1000, BreaseParams{}, 38);
  const auto t0 = moments(theta0s(d));
  const auto ee = moments(column(d, [](const BreaseParams& p) { return p.eta_e; }));
  EXPECT_NEAR(t0.mean, 0.5, 3.0 * t0.se);
  EXPECT_NEAR(ee.mean, 0.3, 3.0 * ee.se);
}

TEST(GibbsSampler, RejectsBadArguments) {
  EXPECT_THROW(gibbs_sample({1, 2, 1, 2}, default_prior(), 10, 10, BreaseParams{}, 1), DomainError);
  EXPECT_THROW(gibbs_sample({1, 2, 1, 2}, default_prior(), 10, 0, BreaseParams{0.0, 0.5, 0.5}, 1), DomainError);
}

TEST(Monotone, NoHarmCovidEfficacy) {
  const auto d = sample_monotone(kCovid, default_prior(), Constraint::no_harm, SamplerMethod::exact, 100000, 0, 39);
  const auto s = summarize(d, Estimand::eta_e);
  EXPECT_NEAR(s.median, 0.94, 0.01);
  EXPECT_NEAR(s.cri_low, 0.90, 0.01);
  EXPECT_NEAR(s.cri_high, 0.97, 0.01);
  for (const auto& p : d.draws) ASSERT_EQ(p.eta_s, 0.0);
}

TEST(Monotone, NoHarmAllTreatedEventsKillsEfficacy) {
  const auto d = sample_monotone({10, 20, 20, 20}, default_prior(), Constraint::no_harm, SamplerMethod::exact, 20000, 0, 40);
  EXPECT_LT(summarize(d, Estimand::eta_e).cri_high, 0.15);
}

TEST(Monotone, NoBenefitExactVsGibbs) {
  const TrialData d{3, 10, 4, 10};
  const auto ex = sample_monotone(d, default_prior(), Constraint::no_benefit, SamplerMethod::exact, 50000, 0, 41);
  const auto gb = sample_monotone(d, default_prior(), Constraint::no_benefit, SamplerMethod::gibbs, 501000, 1000, 42);
  for (const auto& p : gb.draws) ASSERT_EQ(p.eta_e, 0.0);
  EXPECT_LE(ks_two_sample(theta0s(ex), thin(theta0s(gb), 10)), 0.01);
  EXPECT_THROW(sample_monotone(d, default_prior(), Constraint::none, SamplerMethod::exact, 10, 0, 1), DomainError);
}

TEST(AggregatedNull, SimplexAndEqualRisks) {
  const TrialData d{3, 10, 4, 10};
  const AggregatedPrior prior{0.3, 0.3, 1.0, 1.0};
  for (auto method : {SamplerMethod::exact, SamplerMethod::gibbs}) {
    for (const auto& a : sample_h0_aggregated(d, prior, method, 3000, 500, 43)) {
      ASSERT_NEAR(a.p00 + a.p10s + a.p11, 1.0, 1e-12);
      ASSERT_NEAR((BreaseParams{a.theta0, a.eta_e, a.eta_s}.theta1()), a.theta0, 1e-12);
    }
  }
}

TEST(AggregatedNull, ExactVsGibbs) {
  const TrialData d{3, 10, 4, 10};
  const AggregatedPrior prior{0.3, 0.3, 1.0, 1.0};
  std::vector<double> ex, gb;
  for (const auto& a : sample_h0_aggregated(d, prior, SamplerMethod::exact, 50000, 0, 44)) ex.push_back(a.p10s);
  for (const auto& a : sample_h0_aggregated(d, prior, SamplerMethod::gibbs, 501000, 1000, 45)) gb.push_back(a.p10s);
  EXPECT_LE(ks_two_sample(ex, thin(gb, 10)), 0.01);
}
