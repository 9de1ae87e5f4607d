#include <gtest/gtest.h>

#include <boost/math/special_functions/beta.hpp>

#include "test_util.hpp"

using namespace brease;
using brease::test::moments;

namespace {

BreasePrior random_prior(RngStream& rng) {
  auto u = [&] { return 0.05 + 0.9 * rng.uniform(); };
  auto n = [&] { return 0.5 + 9.5 * rng.uniform(); };
  return make_prior(u(), u(), u(), n(), n(), n());
}

}  // namespace

TEST(RiskOfTreatment, Examples) {
  EXPECT_DOUBLE_EQ(risk_of_treatment({0.3, 0.0, 0.0}), 0.3);
  EXPECT_NEAR(risk_of_treatment({0.5, 0.4, 0.1}), 0.35, 1e-15);
  for (double t : {0.01, 0.3, 0.99}) EXPECT_NEAR(risk_of_treatment({t, 0.75, 0.25}), 0.25, 1e-15);
  EXPECT_THROW(risk_of_treatment({1.2, 0.0, 0.0}), DomainError);
}

TEST(LogLikelihood, EmptyTrialIsZero) { EXPECT_DOUBLE_EQ(log_likelihood({0, 0, 0, 0}, {0.3, 0.2, 0.1}), 0.0); }

TEST(LogLikelihood, DoubleSumMatchesDirect) {
  const TrialData d{1, 2, 1, 2};
  const BreaseParams p{0.5, 0.2, 0.2};
  EXPECT_NEAR(log_likelihood(d, p, LikelihoodPath::double_sum), log_likelihood(d, p), 1e-10);
  RngStream rng(21);
  for (int i = 0; i < 200; ++i) {
    const TrialData r{static_cast<std::int64_t>(rng.uniform() * 6), 6, static_cast<std::int64_t>(rng.uniform() * 8), 8};
    const BreaseParams q{rng.uniform(), rng.uniform(), rng.uniform()};
    EXPECT_NEAR(log_likelihood(r, q, LikelihoodPath::double_sum), log_likelihood(r, q), 1e-10);
  }
}

TEST(LogLikelihood, ImpossibleEventIsNegInf) {
  const TrialData d{0, 1, 1, 1};
  const BreaseParams p{0.5, 1.0, 0.0};
  EXPECT_EQ(log_likelihood(d, p), kNegInf);
  EXPECT_EQ(log_likelihood(d, p, LikelihoodPath::double_sum), kNegInf);
}

TEST(ResponseTypes, Examples) {
  const auto r = response_type_probs({0.5, 0.5, 0.5});
  for (double v : {r.p00, r.p10, r.p01, r.p11}) EXPECT_DOUBLE_EQ(v, 0.25);
  const auto z = response_type_probs({0.4, 0.0, 0.0});
  EXPECT_EQ(z.p01, 0.0);
  EXPECT_EQ(z.p10, 0.0);
  RngStream rng(22);
  for (int i = 0; i < 100; ++i) {
    const BreaseParams p{rng.uniform(), rng.uniform(), rng.uniform()};
    const auto q = response_type_probs(p);
    EXPECT_NEAR(q.p10 + q.p11, p.theta0, 1e-15);
    EXPECT_NEAR(q.p01 + q.p11, p.theta1(), 1e-15);
    EXPECT_NEAR(q.p00 + q.p10 + q.p01 + q.p11, 1.0, 1e-15);
  }
}

TEST(PartialId, Examples) {
  auto b = partial_id_bounds(0.5, 0.5);
  EXPECT_EQ(b.eta_e_low, 0.0);
  EXPECT_EQ(b.eta_e_high, 1.0);
  EXPECT_EQ(b.eta_s_low, 0.0);
  EXPECT_EQ(b.eta_s_high, 1.0);
  b = partial_id_bounds(0.3, 0.0);
  EXPECT_EQ(b.eta_e_low, 1.0);
  EXPECT_EQ(b.eta_e_high, 1.0);
  EXPECT_EQ(b.eta_s_low, 0.0);
  EXPECT_EQ(b.eta_s_high, 0.0);
  // No harm: eta_e = 1 - theta1 / theta0 is the lower end of the interval.
  b = partial_id_bounds(0.4, 0.1);
  EXPECT_NEAR(b.eta_e_low, 0.75, 1e-15);
  EXPECT_LE(b.eta_e_low, b.eta_e_high);
  EXPECT_THROW(partial_id_bounds(0.0, 0.2), DomainError);
}

TEST(PriorCovariance, Examples) {
  EXPECT_EQ(prior_covariance(make_prior(0.3, 0.4, 0.6, 3, 2, 5)).cov, 0.0);
  const auto m = prior_covariance(default_prior());
  EXPECT_NEAR(m.cov, 0.25 * 0.4 / 3.0, 1e-15);
  EXPECT_NEAR(m.cor, 0.4, 1e-12);
  EXPECT_NEAR(prior_covariance(default_prior(0.5)).cor, 0.0, 1e-15);
}

TEST(PriorCovariance, MonteCarlo) {
  RngStream rng(23);
  const auto prior = default_prior();
  const std::size_t n = 1000000;
  std::vector<double> prod(n), t0(n), t1(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = sample_prior(prior, rng);
    t0[i] = p.theta0;
    t1[i] = p.theta1();
  }
  const double m0 = moments(t0).mean, m1 = moments(t1).mean;
  for (std::size_t i = 0; i < n; ++i) prod[i] = (t0[i] - m0) * (t1[i] - m1);
  const auto c = moments(prod);
  EXPECT_NEAR(c.mean, prior_covariance(prior).cov, 3.0 * c.se);
  EXPECT_NEAR(moments(t1).var, prior_covariance(prior).var1, 1e-3);
}

TEST(ConditionalDensity, UniformClosedForm) {
  const auto u = make_prior(0.5, 0.5, 0.5, 2, 2, 2);
  EXPECT_NEAR(conditional_density_theta1(u, 0.25, 0.1), 0.1 / (0.25 * 0.75), 1e-12);
  EXPECT_NEAR(conditional_density_theta1(u, 0.25, 0.5), 1.0 / 0.75, 1e-12);
  DensityOptions numeric;
  numeric.force_numeric = true;
  RngStream rng(24);
  for (int i = 0; i < 50; ++i) {
    const double t0 = 0.02 + 0.96 * rng.uniform();
    const double t1 = rng.uniform();
    EXPECT_NEAR(conditional_density_theta1(u, t0, t1, numeric), conditional_density_theta1(u, t0, t1), 1e-6);
  }
}

TEST(ConditionalDensity, Normalized) {
  RngStream rng(25);
  for (int i = 0; i < 6; ++i) {
    const auto prior = random_prior(rng);
    const double t0 = 0.1 + 0.8 * rng.uniform();
    double total = 0.0;
    const double cuts[] = {0.0, std::min(t0, 1.0 - t0), std::max(t0, 1.0 - t0), 1.0};
    for (int k = 0; k < 3; ++k)
      total += integrate_tanh_sinh([&](double x) { return conditional_density_theta1(prior, t0, x); }, cuts[k],
                                   cuts[k + 1], 1e-9)
                   .value;
    EXPECT_NEAR(total, 1.0, 1e-6) << "prior " << i << " theta0 " << t0;
  }
}

TEST(MarginalDensity, ClosedForms) {
  const auto u = make_prior(0.5, 0.5, 0.5, 2, 2, 2);
  EXPECT_NEAR(marginal_density_theta1(u, 0.5), 2.0 * std::log(2.0), 1e-12);
  EXPECT_NEAR(marginal_density_theta1(u, 0.1, Constraint::no_harm), -std::log(0.1), 1e-12);
  EXPECT_NEAR(marginal_density_theta1(u, 0.1, Constraint::no_benefit), -std::log(0.9), 1e-12);
  DensityOptions numeric;
  numeric.force_numeric = true;
  for (double t : {0.05, 0.3, 0.5, 0.8}) {
    EXPECT_NEAR(marginal_density_theta1(u, t, Constraint::none, numeric), marginal_density_theta1(u, t), 1e-6);
    EXPECT_NEAR(marginal_density_theta1(u, t, Constraint::no_harm, numeric), -std::log(t), 1e-6);
  }
}

TEST(MarginalDensity, EqualConfidenceIsBeta) {
  const auto prior = make_prior(0.4, 0.3, 0.2, 5.0, 2.0, 3.0);
  ASSERT_TRUE(is_equal_confidence(prior));
  const double m = (1.0 - prior.mue) * prior.mu0 + prior.mus * (1.0 - prior.mu0);
  for (double t : {0.02, 0.15, 0.4, 0.7, 0.95})
    EXPECT_NEAR(marginal_density_theta1(prior, t), beta_pdf(t, m * 5.0, (1.0 - m) * 5.0), 1e-4) << t;
}

TEST(GeneralizedDirichlet, Examples) {
  const auto g = to_generalized_dirichlet(make_prior(0.5, 0.5, 0.5, 2, 1, 1));
  for (int k = 0; k < 4; ++k) {
    EXPECT_DOUBLE_EQ(g.a[k], 0.5);
    EXPECT_DOUBLE_EQ(g.b[k], 1.0);
  }
  const auto e = to_generalized_dirichlet(make_prior(0.4, 0.3, 0.2, 5.0, 2.0, 3.0));
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(e.b[k], 1.0, 1e-12);
}

TEST(Dirichlet, RoundTrip) {
  const DirichletParams d{0.7, 1.3, 0.4, 2.2};
  const auto p = prior_from_dirichlet(d);
  EXPECT_TRUE(is_equal_confidence(p));
  const auto back = dirichlet_from_prior(p);
  EXPECT_NEAR(back.a00, d.a00, 1e-12);
  EXPECT_NEAR(back.a10, d.a10, 1e-12);
  EXPECT_NEAR(back.a01, d.a01, 1e-12);
  EXPECT_NEAR(back.a11, d.a11, 1e-12);
  EXPECT_TRUE(is_equal_confidence(default_prior()));
  EXPECT_THROW(dirichlet_from_prior(make_prior(0.5, 0.3, 0.3, 2.0, 2.0, 1.0)), DomainError);
}

TEST(EmpiricalBayes, Examples) {
  const auto e = brease_eb_prior({0, 0, 0, 0}, 1.0);
  EXPECT_DOUBLE_EQ(e.mue, 0.5);
  EXPECT_DOUBLE_EQ(e.mus, 0.5);
  EXPECT_DOUBLE_EQ(e.ne, 1.0);

  const double t0 = 27.0 / 11036.0, t1 = 11.0 / 11039.0;
  const auto a = brease_eb_prior(test::kAspirin, 1.0);
  EXPECT_NEAR(a.mue, 0.5 * ((1.0 - t1 / t0) + 1.0), 1e-12);
  EXPECT_NEAR(a.mus, 0.5 * (t1 / (1.0 - t0)), 1e-12);
  EXPECT_THROW(brease_eb_prior(test::kAspirin, 0.0), ValidationError);
}

TEST(DefaultPrior, Examples) {
  EXPECT_EQ(default_prior(), (BreasePrior{0.5, 0.3, 0.3, 2.0, 1.0, 1.0}));
  EXPECT_THROW(default_prior(1.5), DomainError);
  EXPECT_THROW(make_prior(0.5, 0.3, 0.3, 0.0, 1.0, 1.0), DomainError);
}

TEST(PriorDraws, EqualConfidenceTheta1IsBeta) {
  const auto prior = make_prior(0.4, 0.3, 0.2, 5.0, 2.0, 3.0);
  const double m = (1.0 - prior.mue) * prior.mu0 + prior.mus * (1.0 - prior.mu0);
  RngStream rng(26);
  std::vector<double> t1(100000);
  for (auto& v : t1) v = sample_prior(prior, rng).theta1();
  const double d = ks_one_sample(t1, [&](double x) { return boost::math::ibeta(m * 5.0, (1.0 - m) * 5.0, x); });
  EXPECT_GT(ks_p_value(d, t1.size()), 1e-3);
}

TEST(PriorDraws, NoHarmProductOfBetas) {
  // theta1 = theta0 (1 - eta_e) is Beta((1-mue) ne, (1-mu0) n0 + mue ne) when ne = mu0 n0.
  const auto prior = make_prior(0.4, 0.3, 0.5, 5.0, 2.0, 1.0);
  RngStream rng(27);
  std::vector<double> t1(100000);
  for (auto& v : t1) {
    const auto p = sample_prior(prior, rng, Constraint::no_harm);
    ASSERT_EQ(p.eta_s, 0.0);
    v = p.theta1();
  }
  const double d = ks_one_sample(t1, [](double x) { return boost::math::ibeta(1.4, 3.0 + 0.6, x); });
  EXPECT_GT(ks_p_value(d, t1.size()), 1e-3);
}
