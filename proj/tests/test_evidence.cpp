#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace brease;
using namespace brease::test;

TEST(EvidenceM0, Examples) {
  const BreasePrior p{0.5, 0.3, 0.3, 2.0, 1.0, 1.0};
  EXPECT_NEAR(log_ml_m0({0, 1, 0, 1}, p).log_ml, std::log(1.0 / 3.0), 1e-14);
  EXPECT_DOUBLE_EQ(log_ml_m0({0, 0, 0, 0}, p).log_ml, 0.0);
  EXPECT_NEAR(log_ml_m0({1, 2, 1, 2}, p).log_ml, oracle_log_ml({1, 2, 1, 2}, p, OracleModel::M0), 1e-6);
}

TEST(EvidenceM1, Examples) {
  EXPECT_NEAR(log_ml_m1({0, 0, 0, 0}, default_prior()).log_ml, 0.0, 1e-14);
  const TrialData d{2, 5, 3, 6};
  EXPECT_NEAR(log_ml_m1(d, default_prior()).log_ml, oracle_log_ml(d, default_prior(), OracleModel::M1), 1e-4);
  const auto bf = bayes_factor(log_ml_m1(kAspirin, default_prior()), log_ml_m0(kAspirin, default_prior()));
  EXPECT_NEAR(bf.bf, 1.2, 0.05);
  EXPECT_EQ(bf.mc_error, 0.0);
}

TEST(EvidenceM1, OrderInvariant) {
  for (const TrialData& d : {TrialData{2, 5, 3, 6}, kAspirin}) {
    EXPECT_NEAR(log_ml_m1(d, default_prior()).log_ml, log_ml_m1(d, default_prior(), true).log_ml, 1e-10);
    EXPECT_NEAR(log_ml_monotone(d, default_prior(), Constraint::no_harm).log_ml,
                log_ml_monotone(d, default_prior(), Constraint::no_harm, true).log_ml, 1e-10);
  }
}

TEST(EvidenceM1, MatchesTableEvidence) {
  const TrialData d{7, 40, 3, 35};
  EXPECT_NEAR(MixtureTable(d, default_prior()).log_marginal_likelihood(), log_ml_m1(d, default_prior()).log_ml, 1e-10);
}

TEST(EvidenceMonotone, Examples) {
  for (auto c : {Constraint::no_harm, Constraint::no_benefit})
    EXPECT_NEAR(log_ml_monotone({0, 0, 0, 0}, default_prior(), c).log_ml, 0.0, 1e-14);
  const TrialData d{2, 5, 3, 6};
  EXPECT_NEAR(log_ml_monotone(d, default_prior(), Constraint::no_harm).log_ml,
              oracle_log_ml(d, default_prior(), OracleModel::no_harm), 1e-5);
  EXPECT_NEAR(log_ml_monotone(d, default_prior(), Constraint::no_benefit).log_ml,
              oracle_log_ml(d, default_prior(), OracleModel::no_benefit), 1e-5);
  EXPECT_EQ(log_ml_monotone(d, default_prior(), Constraint::no_harm).model, Model::M_minus_mono);
  EXPECT_THROW(log_ml_monotone(d, default_prior(), Constraint::none), DomainError);
}

TEST(EvidenceMonotone, NoHarmIsLimitOfM1) {
  // eta_s ~ Beta(1e-10, ~1e-6) puts mass 1e-4 near one and the rest at zero.
  const TrialData d{2, 5, 3, 6};
  const auto p = make_prior(0.5, 0.3, 1e-4, 2.0, 1.0, 1e-6);
  EXPECT_NEAR(log_ml_m1(d, p).log_ml, log_ml_monotone(d, p, Constraint::no_harm).log_ml, 1e-3);
}

TEST(EvidenceDirectional, SymmetricPriorHalf) {
  DirectionalProbabilities probs{};
  const auto e = log_ml_directional({2, 5, 3, 6}, default_prior(), Direction::benefit, 200000, 20000, 51, &probs);
  EXPECT_NEAR(probs.prior_prob, 0.5, 3.0 * std::sqrt(0.25 / 200000.0));
  EXPECT_GT(e.mc_error, 0.0);
  EXPECT_EQ(e.model, Model::M_minus);
}

TEST(EvidenceDirectional, WeightsRecombine) {
  const TrialData d{2, 5, 3, 6};
  const auto prior = make_prior(0.4, 0.2, 0.35, 3.0, 2.0, 1.5);
  DirectionalProbabilities minus{}, plus{};
  const auto l1 = log_ml_m1(d, prior).log_ml;
  const auto lm = log_ml_directional(d, prior, Direction::benefit, 100000, 100000, 52, &minus);
  const auto lp = log_ml_directional(d, prior, Direction::harm, 100000, 100000, 53, &plus);
  const double total = minus.prior_prob * std::exp(lm.log_ml - l1) + plus.prior_prob * std::exp(lp.log_ml - l1);
  const double se = std::sqrt(0.25 / 100000.0) * 2.0;
  EXPECT_NEAR(total, 1.0, 4.0 * se);
  EXPECT_NEAR(minus.prior_prob + plus.prior_prob, 1.0, 4.0 * se);
}

TEST(EvidenceDirectional, CovidBenefitIsCertain) {
  DirectionalProbabilities probs{};
  const auto e = log_ml_directional(kCovid, default_prior(), Direction::benefit, 100000, 20000, 54, &probs);
  EXPECT_EQ(probs.posterior_prob, 1.0);
  EXPECT_NEAR(e.log_ml, log_ml_m1(kCovid, default_prior()).log_ml - std::log(probs.prior_prob), 1e-9);
  EXPECT_THROW(log_ml_directional(kCovid, default_prior(), Direction::benefit, 100, 100, 1), DomainError);
}

TEST(EvidenceSymmetrized, SymmetricDataAndSwap) {
  const auto p = default_prior();
  const TrialData sym{3, 9, 3, 9};
  // Label-symmetric data: both symmetrized models pool the same two components.
  EXPECT_NEAR(log_ml_symmetrized_minus(sym, p, p).log_ml, log_ml_symmetrized_plus(sym, p, p).log_ml, 1e-12);

  const TrialData d{2, 5, 3, 6};
  const auto pf = make_prior(0.4, 0.2, 0.35, 3.0, 2.0, 1.5);
  const auto pr = make_prior(0.6, 0.25, 0.3, 2.0, 1.0, 1.0);
  const double fwd = oracle_log_ml(d, pf, OracleModel::no_harm);
  const double rev = oracle_log_ml(d.swapped(), pr, OracleModel::no_benefit);
  EXPECT_NEAR(log_ml_symmetrized_minus(d, pf, pr).log_ml, std::log(0.5 * (std::exp(fwd) + std::exp(rev))), 1e-5);
  // Exchanging the arms turns a benefit model into a harm model.
  EXPECT_NEAR(log_ml_symmetrized_minus(d, pf, pr).log_ml, log_ml_symmetrized_plus(d.swapped(), pr, pf).log_ml, 1e-12);
}

TEST(EvidenceH0, Examples) {
  const AggregatedPrior u{0.5, 0.5, 1.0, 1.0};
  EXPECT_NEAR(log_ml_h0_aggregated({0, 0, 0, 0}, u).log_ml, 0.0, 1e-14);
  const TrialData d{1, 2, 1, 2};
  const auto p = make_prior(0.5, 0.5, 0.5, 2.0, 1.0, 1.0);
  EXPECT_NEAR(log_ml_h0_aggregated(d, u).log_ml, oracle_log_ml(d, p, OracleModel::H0_aggregated), 1e-5);
  EXPECT_NEAR(log_ml_h0_aggregated(kAspirin, u).log_ml, log_ml_h0_aggregated(kAspirin, u, true).log_ml, 1e-10);
}

TEST(EvidenceH0, MatchesBetaBinomialWhenMergedCellVanishes) {
  // With mue = mus -> 0 the merged cell carries no mass and theta = p11 ~
  // Beta((1-mue) ne, (1-mus) ns), the M0 prior with mu0 n0 = (1-mue) ne.
  const double eps = 1e-10;
  const AggregatedPrior h{eps, eps, 1.5, 2.5};
  const double a = (1.0 - eps) * 1.5, b = (1.0 - eps) * 2.5;
  const auto m0 = make_prior(a / (a + b), 0.5, 0.5, a + b, 1.0, 1.0);
  for (const TrialData& d : {TrialData{1, 2, 1, 2}, TrialData{3, 10, 4, 10}, TrialData{0, 7, 5, 5}})
    EXPECT_NEAR(log_ml_h0_aggregated(d, h).log_ml, log_ml_m0(d, m0).log_ml, 1e-8);
}

TEST(BayesFactor, Basics) {
  const auto e = log_ml_m0({1, 2, 1, 2}, default_prior());
  EXPECT_DOUBLE_EQ(bayes_factor(e, e).bf, 1.0);
  EXPECT_THROW(bayes_factor(e, log_ml_m0({1, 2, 0, 2}, default_prior())), ValidationError);
}

TEST(PosteriorMoments, Examples) {
  EXPECT_NEAR(analytic_posterior_moment({0, 0, 0, 0}, default_prior(), Functional::theta0), 0.5, 1e-14);
  EXPECT_NEAR(analytic_posterior_moment({0, 0, 0, 0}, default_prior(), Functional::eta_e), 0.3, 1e-14);

  const ExactSampler s(kAspirin, default_prior());
  const auto d = s.sample(100000, 55);
  const auto rd = moments(column(d, [](const BreaseParams& p) { return p.theta1() - p.theta0; }));
  EXPECT_NEAR(analytic_posterior_moment(s.table(), Functional::risk_difference), rd.mean, 3.0 * rd.se);
  const auto rr = moments(column(d, [](const BreaseParams& p) { return p.theta1() / p.theta0; }));
  EXPECT_NEAR(analytic_posterior_moment(s.table(), Functional::risk_ratio), rr.mean, 3.0 * rr.se);
}

TEST(PosteriorMoments, RiskRatioDivergenceIsReported) {
  EXPECT_THROW(analytic_posterior_moment({0, 0, 0, 0}, default_prior(), Functional::risk_ratio), NumericError);
}
