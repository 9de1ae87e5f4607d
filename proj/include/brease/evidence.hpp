#ifndef BREASE_EVIDENCE_HPP
#define BREASE_EVIDENCE_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "brease/mixture.hpp"
#include "brease/model.hpp"
#include "brease/samplers.hpp"
#include "brease/trial_data.hpp"

namespace brease {

enum class Model {
  M0,
  M1,
  M_minus,
  M_plus,
  M_minus_mono,
  M_plus_mono,
  M_minus_sym,
  M_plus_sym,
  H0_aggregated,
  IB_H0,
  IB_H1,
  LT_H0,
  LT_H1,
};

inline const char* to_string(Model m) {
  switch (m) {
    case Model::M0: return "M0";
    case Model::M1: return "M1";
    case Model::M_minus: return "M_minus";
    case Model::M_plus: return "M_plus";
    case Model::M_minus_mono: return "M_minus_mono";
    case Model::M_plus_mono: return "M_plus_mono";
    case Model::M_minus_sym: return "M_minus_sym";
    case Model::M_plus_sym: return "M_plus_sym";
    case Model::H0_aggregated: return "H0_aggregated";
    case Model::IB_H0: return "IB_H0";
    case Model::IB_H1: return "IB_H1";
    case Model::LT_H0: return "LT_H0";
    case Model::LT_H1: return "LT_H1";
  }
  return "?";
}

struct LogEvidence {
  double log_ml = 0.0;
  Model model = Model::M1;
  double mc_error = 0.0;  // standard error of log_ml; 0 when fully analytic
  std::uint64_t data_fingerprint = 0;
};

struct BayesFactor {
  double bf;
  double log_bf;
  double mc_error;
};

inline BayesFactor bayes_factor(const LogEvidence& num, const LogEvidence& den) {
  if (num.data_fingerprint != den.data_fingerprint)
    throw ValidationError("Bayes factor requested across different datasets");
  const double lb = num.log_ml - den.log_ml;
  return {std::exp(lb), lb, std::hypot(num.mc_error, den.mc_error)};
}

/// Beta-binomial evidence of the null model theta1 = theta0 ~ Beta*(mu0, n0).
inline LogEvidence log_ml_m0(const TrialData& data, const BreasePrior& prior) {
  require_valid(data);
  prior.validate();
  const auto s = prior.theta0();
  const double y = static_cast<double>(data.events());
  const double f = static_cast<double>(data.N() - data.events());
  const double v = log_choose(data.N0, data.y0) + log_choose(data.N1, data.y1) + log_beta(y + s.a, f + s.b) -
                   log_beta(s.a, s.b);
  return {v, Model::M0, 0.0, fingerprint(data)};
}

inline LogEvidence log_ml_m1(const TrialData& data, const BreasePrior& prior, bool reverse_order = false) {
  return {mixture_log_ml(data, prior, Constraint::none, reverse_order), Model::M1, 0.0, fingerprint(data)};
}

/// Monotone submodels: no_harm (eta_s = 0, labelled M_minus_mono) and
/// no_benefit (eta_e = 0, M_plus_mono).
inline LogEvidence log_ml_monotone(const TrialData& data, const BreasePrior& prior, Constraint constraint,
                                   bool reverse_order = false) {
  if (constraint == Constraint::none) throw DomainError("log_ml_monotone needs no_harm or no_benefit");
  return {mixture_log_ml(data, prior, constraint, reverse_order),
          constraint == Constraint::no_harm ? Model::M_minus_mono : Model::M_plus_mono, 0.0, fingerprint(data)};
}

enum class Direction { benefit, harm };

namespace detail {

inline bool in_direction(const BreaseParams& p, Direction d) {
  const double t1 = p.theta1();
  return d == Direction::benefit ? t1 < p.theta0 : t1 > p.theta0;
}

inline double log_mean_exp2(double a, double b) { return log_sum_exp({a, b}) - std::log(2.0); }

}  // namespace detail

struct DirectionalProbabilities {
  double prior_prob;
  double posterior_prob;
};

/// Evidence of M1 restricted to theta1 < theta0 (benefit) or theta1 > theta0
/// (harm): the M1 evidence scaled by posterior over prior probability of the
/// event, both estimated from exact i.i.d. draws.
inline LogEvidence log_ml_directional(const TrialData& data, const BreasePrior& prior, Direction direction,
                                      std::int64_t prior_draws, std::int64_t posterior_draws, std::uint64_t seed,
                                      DirectionalProbabilities* probs = nullptr) {
  if (prior_draws < 10000 || posterior_draws < 10000)
    throw DomainError("directional evidence needs at least 1e4 prior and posterior draws");
  const RngStream root(seed);
  RngStream prior_rng = root.derive(0);
  std::int64_t prior_hits = 0;
  for (std::int64_t i = 0; i < prior_draws; ++i)
    prior_hits += detail::in_direction(sample_prior(prior, prior_rng), direction) ? 1 : 0;
  const ExactSampler sampler(data, prior);
  RngStream post_rng = root.derive(1);
  std::int64_t post_hits = 0;
  for (std::int64_t i = 0; i < posterior_draws; ++i)
    post_hits += detail::in_direction(sampler.draw(post_rng), direction) ? 1 : 0;
  if (prior_hits == 0 || post_hits == 0)
    throw NumericError("directional event never sampled; increase the draw counts");
  const double pp = static_cast<double>(prior_hits) / static_cast<double>(prior_draws);
  const double qp = static_cast<double>(post_hits) / static_cast<double>(posterior_draws);
  if (probs) *probs = {pp, qp};
  // Delta-method standard errors of ln p.
  const double se = std::sqrt((1.0 - pp) / (pp * static_cast<double>(prior_draws)) +
                              (1.0 - qp) / (qp * static_cast<double>(posterior_draws)));
  return {sampler.table().log_marginal_likelihood() + std::log(qp) - std::log(pp),
          direction == Direction::benefit ? Model::M_minus : Model::M_plus, se, fingerprint(data)};
}

/// Average of the forward no-harm evidence (baseline theta0, efficacy) and the
/// arm-swapped no-benefit evidence (baseline theta1, reverse side effect).
inline LogEvidence log_ml_symmetrized_minus(const TrialData& data, const BreasePrior& prior_forward,
                                            const BreasePrior& prior_reverse) {
  const double fwd = mixture_log_ml(data, prior_forward, Constraint::no_harm);
  const double rev = mixture_log_ml(data.swapped(), prior_reverse, Constraint::no_benefit);
  return {detail::log_mean_exp2(fwd, rev), Model::M_minus_sym, 0.0, fingerprint(data)};
}

inline LogEvidence log_ml_symmetrized_plus(const TrialData& data, const BreasePrior& prior_forward,
                                           const BreasePrior& prior_reverse) {
  const double fwd = mixture_log_ml(data, prior_forward, Constraint::no_benefit);
  const double rev = mixture_log_ml(data.swapped(), prior_reverse, Constraint::no_harm);
  return {detail::log_mean_exp2(fwd, rev), Model::M_plus_sym, 0.0, fingerprint(data)};
}

/// Evidence of the aggregated-Dirichlet null model.
inline LogEvidence log_ml_h0_aggregated(const TrialData& data, const AggregatedPrior& prior,
                                        bool reverse_order = false) {
  require_valid(data);
  prior.validate();
  const std::int64_t rows = data.events() + 1;
  const std::int64_t cols = data.N() - data.events() + 1;
  std::vector<double> row(static_cast<std::size_t>(cols));
  std::vector<double> row_sums(static_cast<std::size_t>(rows));
  for (std::int64_t i = 0; i < rows; ++i) {
    const std::int64_t r = reverse_order ? rows - 1 - i : i;
    for (std::int64_t j = 0; j < cols; ++j) {
      const std::int64_t c = reverse_order ? cols - 1 - j : j;
      row[static_cast<std::size_t>(j)] = detail::aggregated_log_weight(data, prior, r, c);
    }
    row_sums[static_cast<std::size_t>(i)] = log_sum_exp(row);
  }
  const auto a = prior.concentrations();
  const double v = log_choose(data.N0, data.y0) + log_choose(data.N1, data.y1) + log_sum_exp(row_sums) -
                   log_beta3(a[0], a[1], a[2]);
  return {v, Model::H0_aggregated, 0.0, fingerprint(data)};
}

// ---------------------------------------------------------------------------
// Posterior moments from the mixture weights

enum class Functional { theta0, eta_e, eta_s, risk_ratio, risk_difference };

inline double analytic_posterior_moment(const MixtureTable& table, Functional f) {
  switch (f) {
    case Functional::theta0: return table.expect([](const MixtureComponent& m) { return m.theta0.mean(); });
    case Functional::eta_e:
      if (table.constraint() == Constraint::no_benefit) return 0.0;
      return table.expect([](const MixtureComponent& m) { return m.eta_e.mean(); });
    case Functional::eta_s:
      if (table.constraint() == Constraint::no_harm) return 0.0;
      return table.expect([](const MixtureComponent& m) { return m.eta_s.mean(); });
    case Functional::risk_difference: {
      const double es = analytic_posterior_moment(table, Functional::eta_s);
      const bool has_e = table.constraint() != Constraint::no_benefit;
      const bool has_s = table.constraint() != Constraint::no_harm;
      const double t0e =
          has_e ? table.expect([](const MixtureComponent& m) { return m.theta0.mean() * m.eta_e.mean(); }) : 0.0;
      const double t0s =
          has_s ? table.expect([](const MixtureComponent& m) { return m.theta0.mean() * m.eta_s.mean(); }) : 0.0;
      return es - t0e - t0s;
    }
    case Functional::risk_ratio: {
      const bool has_s = table.constraint() != Constraint::no_harm;
      double inv = 0.0;
      if (has_s) {
        // E[eta_s / theta0] is finite only when every theta0 posterior shape a exceeds 1.
        double min_a = std::numeric_limits<double>::infinity();
        for (std::int64_t r = 0; r < table.rows(); ++r)
          for (std::int64_t q = 0; q < table.cols(); ++q) min_a = std::min(min_a, table.component(r, q).theta0.a);
        if (!(min_a > 1.0))
          throw NumericError("E[RR|D] diverges: smallest theta0 posterior shape a = " + std::to_string(min_a) +
                             " must exceed 1");
        inv = table.expect([](const MixtureComponent& m) {
          return m.eta_s.mean() * (m.theta0.a + m.theta0.b - 1.0) / (m.theta0.a - 1.0);
        });
      }
      return 1.0 - analytic_posterior_moment(table, Functional::eta_e) -
             analytic_posterior_moment(table, Functional::eta_s) + inv;
    }
  }
  return 0.0;
}

inline double analytic_posterior_moment(const TrialData& data, const BreasePrior& prior, Functional f) {
  return analytic_posterior_moment(MixtureTable(data, prior), f);
}

}  // namespace brease

#endif  // BREASE_EVIDENCE_HPP
