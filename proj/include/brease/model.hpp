#ifndef BREASE_MODEL_HPP
#define BREASE_MODEL_HPP

// The BREASE parameterization: baseline risk theta0, efficacy eta_e and side
// effects eta_s, with theta1 = (1 - eta_e) theta0 + eta_s (1 - theta0).

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "brease/errors.hpp"
#include "brease/numerics.hpp"
#include "brease/trial_data.hpp"

namespace brease {

enum class Constraint { none, no_harm, no_benefit };

inline const char* to_string(Constraint c) {
  switch (c) {
    case Constraint::none: return "none";
    case Constraint::no_harm: return "no_harm";
    case Constraint::no_benefit: return "no_benefit";
  }
  return "?";
}

// Beta*(mean, size) is Beta(mean*size, (1-mean)*size).
struct BetaShape {
  double a;
  double b;
  double mean() const { return a / (a + b); }
  double variance() const { return a * b / ((a + b) * (a + b) * (a + b + 1.0)); }
};

inline BetaShape beta_star(double mean, double size) { return {mean * size, (1.0 - mean) * size}; }

struct BreasePrior {
  double mu0 = 0.5;
  double mue = 0.5;
  double mus = 0.5;
  double n0 = 2.0;
  double ne = 2.0;
  double ns = 2.0;

  BetaShape theta0() const { return beta_star(mu0, n0); }
  BetaShape eta_e() const { return beta_star(mue, ne); }
  BetaShape eta_s() const { return beta_star(mus, ns); }

  void validate() const {
    for (double m : {mu0, mue, mus})
      if (!(m > 0.0 && m < 1.0)) throw DomainError("prior means must lie strictly inside (0,1)");
    for (double n : {n0, ne, ns})
      if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("prior sample sizes must be positive and finite");
  }

  friend bool operator==(const BreasePrior&, const BreasePrior&) = default;
};

inline BreasePrior make_prior(double mu0, double mue, double mus, double n0, double ne, double ns) {
  BreasePrior p{mu0, mue, mus, n0, ne, ns};
  p.validate();
  return p;
}

/// BREASE(1/2, mu, mu; 2, 1, 1): uniform baseline risk, symmetric efficacy and
/// side effects. mu = 0.3 makes theta1 marginally uniform as well.
inline BreasePrior default_prior(double mu = 0.3) {
  if (!(mu > 0.0 && mu < 1.0)) throw DomainError("default prior mean must lie in (0,1)");
  return BreasePrior{0.5, mu, mu, 2.0, 1.0, 1.0};
}

struct BreaseParams {
  double theta0 = 0.5;
  double eta_e = 0.5;
  double eta_s = 0.5;

  double theta1() const { return (1.0 - eta_e) * theta0 + eta_s * (1.0 - theta0); }

  void validate() const {
    for (double v : {theta0, eta_e, eta_s})
      if (!(v >= 0.0 && v <= 1.0)) throw DomainError("BREASE parameters must lie in [0,1]");
  }
};

inline double risk_of_treatment(const BreaseParams& p) {
  p.validate();
  return p.theta1();
}

// ---------------------------------------------------------------------------
// Likelihood

enum class LikelihoodPath { direct, double_sum };

namespace detail {
// k ln x with the 0 ln 0 = 0 convention.
inline double xlogy(double k, double x) {
  if (k == 0.0) return 0.0;
  return x > 0.0 ? k * std::log(x) : kNegInf;
}
}  // namespace detail

/// Log binomial likelihood of both arms, including the binomial coefficients.
/// The double-sum path expands theta1 over the latent causal/preventive counts
/// and exists for cross-checking only.
inline double log_likelihood(const TrialData& data, const BreaseParams& p,
                             LikelihoodPath path = LikelihoodPath::direct) {
  require_valid(data);
  p.validate();
  const double coef = log_choose(data.N0, data.y0) + log_choose(data.N1, data.y1);
  if (path == LikelihoodPath::direct) {
    return coef + binomial_log_kernel(data.y0, data.N0, p.theta0) + binomial_log_kernel(data.y1, data.N1, p.theta1());
  }
  const std::int64_t f1 = data.N1 - data.y1;
  const double f0 = static_cast<double>(data.N0 - data.y0);
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>((data.y1 + 1) * (f1 + 1)));
  using detail::xlogy;
  for (std::int64_t c = 0; c <= data.y1; ++c) {
    for (std::int64_t q = 0; q <= f1; ++q) {
      const double dc = static_cast<double>(c);
      const double dq = static_cast<double>(q);
      terms.push_back(log_choose(data.y1, c) + log_choose(f1, q) +
                      xlogy(static_cast<double>(data.y0 + data.y1 - c + q), p.theta0) +
                      xlogy(f0 + dc + static_cast<double>(f1 - q), 1.0 - p.theta0) + xlogy(dq, p.eta_e) +
                      xlogy(static_cast<double>(data.y1 - c), 1.0 - p.eta_e) + xlogy(dc, p.eta_s) +
                      xlogy(static_cast<double>(f1 - q), 1.0 - p.eta_s));
    }
  }
  return coef + log_sum_exp(terms);
}

// ---------------------------------------------------------------------------
// Response types

// p_jk = P(Y(0) = j, Y(1) = k): immune (00), preventive (10), causal (01), doomed (11).
struct ResponseTypeProbs {
  double p00;
  double p10;
  double p01;
  double p11;
};

inline ResponseTypeProbs response_type_probs(const BreaseParams& p) {
  p.validate();
  return {(1.0 - p.eta_s) * (1.0 - p.theta0), p.eta_e * p.theta0, p.eta_s * (1.0 - p.theta0),
          (1.0 - p.eta_e) * p.theta0};
}

struct IdentificationBounds {
  double eta_e_low;
  double eta_e_high;
  double eta_s_low;
  double eta_s_high;
};

/// Sharp bounds on (eta_e, eta_s) implied by the observable risks.
inline IdentificationBounds partial_id_bounds(double theta0, double theta1) {
  if (!(theta0 > 0.0 && theta0 < 1.0)) throw DomainError("partial_id_bounds: theta0 must lie in (0,1)");
  if (!(theta1 >= 0.0 && theta1 <= 1.0)) throw DomainError("partial_id_bounds: theta1 must lie in [0,1]");
  return {std::max(0.0, 1.0 - theta1 / theta0), std::min((1.0 - theta1) / theta0, 1.0),
          std::max(0.0, (theta1 - theta0) / (1.0 - theta0)), std::min(theta1 / (1.0 - theta0), 1.0)};
}

// ---------------------------------------------------------------------------
// Prior moments

struct PriorMoments {
  double cov;
  double var0;
  double var1;
  double cor;
};

inline PriorMoments prior_covariance(const BreasePrior& prior) {
  prior.validate();
  const double m0 = prior.mu0;
  const double var0 = m0 * (1.0 - m0) / (prior.n0 + 1.0);
  const double slope = 1.0 - prior.mue - prior.mus;
  const double cov = var0 * slope;
  const double var_e = prior.mue * (1.0 - prior.mue) / (prior.ne + 1.0);
  const double var_s = prior.mus * (1.0 - prior.mus) / (prior.ns + 1.0);
  const double var1 = var0 * slope * slope + var_e * (var0 + m0 * m0) + var_s * (var0 + (1.0 - m0) * (1.0 - m0));
  return {cov, var0, var1, cov / std::sqrt(var0 * var1)};
}

// ---------------------------------------------------------------------------
// Induced prior on theta1

struct DensityOptions {
  double tolerance = 1e-10;
  bool force_numeric = false;  // skip the closed-form fast paths
};

namespace detail {

inline bool is_uniform(double mean, double size) { return mean == 0.5 && size == 2.0; }

// Density of theta1 given A = theta0 and B = 1 - theta0, both supplied so
// that either may be tiny. Integrates over eta_e; eta_s = (theta1 - (1 - eta_e) A) / B.
inline double conditional_density_ab(const BreasePrior& prior, double A, double B, double theta1, double tol) {
  const BetaShape se = prior.eta_e();
  const BetaShape ss = prior.eta_s();
  const double lo = std::max(0.0, 1.0 - theta1 / A);
  const double hi = std::min(1.0, 1.0 - (theta1 - B) / A);
  // eta_s reaches 0 at lo and 1 at hi whenever those limits are interior.
  auto g = [&](double ee, double d_lo, double d_hi) {
    const double ee_c = (1.0 - hi) + d_hi;
    const double es = lo > 0.0 ? A * d_lo / B : (theta1 - A * ee_c) / B;
    const double es_c = hi < 1.0 ? A * d_hi / B : 1.0 - es;
    return beta_pdf_split(ee, ee_c, se.a, se.b) * beta_pdf_split(es, es_c, ss.a, ss.b) / B;
  };
  return integrate_two_sided(g, {}, lo, hi, tol);
}

}  // namespace detail

/// Density of theta1 given theta0 under the unconstrained prior.
inline double conditional_density_theta1(const BreasePrior& prior, double theta0, double theta1,
                                         const DensityOptions& opt = {}) {
  prior.validate();
  if (!(theta0 > 0.0 && theta0 < 1.0)) throw DomainError("conditional density: theta0 must lie in (0,1)");
  if (theta1 < 0.0 || theta1 > 1.0) return 0.0;
  const double A = theta0;
  const double B = 1.0 - theta0;
  if (!opt.force_numeric && detail::is_uniform(prior.mue, prior.ne) && detail::is_uniform(prior.mus, prior.ns)) {
    const double lo = std::min(A, B);
    const double hi = std::max(A, B);
    if (theta1 <= lo) return theta1 / (A * B);
    if (theta1 <= hi) return 1.0 / hi;
    return (1.0 - theta1) / (A * B);
  }
  return detail::conditional_density_ab(prior, A, B, theta1, opt.tolerance);
}

/// Marginal prior density of theta1. Under no_harm eta_s = 0; under no_benefit eta_e = 0.
inline double marginal_density_theta1(const BreasePrior& prior, double theta1,
                                      Constraint constraint = Constraint::none, const DensityOptions& opt = {}) {
  prior.validate();
  if (theta1 <= 0.0 || theta1 >= 1.0) return 0.0;
  const BetaShape s0 = prior.theta0();
  const double tol = std::max(opt.tolerance, 1e-9);
  switch (constraint) {
    case Constraint::no_harm: {
      if (!opt.force_numeric && detail::is_uniform(prior.mu0, prior.n0) && detail::is_uniform(prior.mue, prior.ne))
        return -std::log(theta1);
      const BetaShape se = prior.eta_e();
      // eta_e = 1 - theta1 / theta0 over theta0 in [theta1, 1].
      auto g = [&](double t0, double d_lo, double d_hi) {
        return beta_pdf_split(t0, d_hi, s0.a, s0.b) * beta_pdf_split(d_lo / t0, theta1 / t0, se.a, se.b) / t0;
      };
      return integrate_two_sided(g, {}, theta1, 1.0, tol);
    }
    case Constraint::no_benefit: {
      if (!opt.force_numeric && detail::is_uniform(prior.mu0, prior.n0) && detail::is_uniform(prior.mus, prior.ns))
        return -std::log1p(-theta1);
      const BetaShape ss = prior.eta_s();
      // eta_s = (theta1 - theta0) / (1 - theta0) over theta0 in [0, theta1].
      auto g = [&](double t0, double, double d_hi) {
        const double b = (1.0 - theta1) + d_hi;
        return beta_pdf_split(t0, b, s0.a, s0.b) * beta_pdf_split(d_hi / b, (1.0 - theta1) / b, ss.a, ss.b) / b;
      };
      return integrate_two_sided(g, {}, 0.0, theta1, tol);
    }
    case Constraint::none: break;
  }
  if (!opt.force_numeric && detail::is_uniform(prior.mu0, prior.n0) && detail::is_uniform(prior.mue, prior.ne) &&
      detail::is_uniform(prior.mus, prior.ns)) {
    return -2.0 * (theta1 * std::log(theta1) + (1.0 - theta1) * std::log1p(-theta1));
  }
  // The conditional density has kinks at theta0 = theta1 and theta0 = 1 - theta1.
  auto g = [&](double t0, double d_lo, double d_hi) {
    if (!(d_lo > 0.0 && d_hi > 0.0)) return 0.0;
    return beta_pdf_split(t0, d_hi, s0.a, s0.b) *
           detail::conditional_density_ab(prior, d_lo, d_hi, theta1, tol * 0.1);
  };
  return integrate_two_sided(g, {theta1, 1.0 - theta1}, 0.0, 1.0, tol);
}

// ---------------------------------------------------------------------------
// Dirichlet and generalized Dirichlet forms

struct GeneralizedDirichletParams {
  std::array<double, 4> a;
  std::array<double, 4> b;
  std::array<std::array<int, 4>, 4> gamma;
};

inline constexpr std::array<std::array<int, 4>, 4> kGdGamma{{{1, 0, 1, 0}, {1, 0, 0, 1}, {0, 1, 1, 0}, {0, 1, 0, 1}}};

inline GeneralizedDirichletParams to_generalized_dirichlet(const BreasePrior& p) {
  p.validate();
  return {{p.mus * p.ns, (1.0 - p.mus) * p.ns, p.mue * p.ne, (1.0 - p.mue) * p.ne},
          {(1.0 - p.mu0) * p.n0 - p.ns + 1.0, p.mu0 * p.n0 - p.ne + 1.0, 1.0, 1.0},
          kGdGamma};
}

// ne = mu0 n0 and ns = (1 - mu0) n0: the prior is a Dirichlet on response types.
inline bool is_equal_confidence(const BreasePrior& p, double rel_tol = 1e-12) {
  auto close = [&](double x, double y) { return std::abs(x - y) <= rel_tol * std::max(std::abs(x), std::abs(y)); };
  return close(p.ne, p.mu0 * p.n0) && close(p.ns, (1.0 - p.mu0) * p.n0);
}

// Dirichlet concentrations in (a00, a10, a01, a11) order.
struct DirichletParams {
  double a00;
  double a10;
  double a01;
  double a11;
};

inline BreasePrior prior_from_dirichlet(const DirichletParams& d) {
  for (double v : {d.a00, d.a10, d.a01, d.a11})
    if (!(v > 0.0)) throw DomainError("Dirichlet concentrations must be positive");
  const double total = d.a00 + d.a10 + d.a01 + d.a11;
  return make_prior((d.a10 + d.a11) / total, d.a10 / (d.a10 + d.a11), d.a01 / (d.a01 + d.a00), total,
                    d.a10 + d.a11, d.a00 + d.a01);
}

inline DirichletParams dirichlet_from_prior(const BreasePrior& p) {
  p.validate();
  if (!is_equal_confidence(p, 1e-9)) throw DomainError("prior is not of equal-confidence (Dirichlet) form");
  return {(1.0 - p.mus) * p.ns, p.mue * p.ne, p.mus * p.ns, (1.0 - p.mue) * p.ne};
}

// ---------------------------------------------------------------------------
// Empirical Bayes prior

/// Centers the effect priors on the midpoints of the partial-identification
/// intervals at the shrunken risks (y + 1) / (N + 2).
inline BreasePrior brease_eb_prior(const TrialData& data, double n) {
  require_valid(data);
  if (!(n > 0.0) || !std::isfinite(n)) throw ValidationError("empirical Bayes sample size must be positive");
  const double t0 = (static_cast<double>(data.y0) + 1.0) / (static_cast<double>(data.N0) + 2.0);
  const double t1 = (static_cast<double>(data.y1) + 1.0) / (static_cast<double>(data.N1) + 2.0);
  const auto b = partial_id_bounds(t0, t1);
  return make_prior(0.5, 0.5 * (b.eta_e_low + b.eta_e_high), 0.5 * (b.eta_s_low + b.eta_s_high), 2.0, n, n);
}

// ---------------------------------------------------------------------------
// Prior draws

inline BreaseParams sample_prior(const BreasePrior& prior, RngStream& rng, Constraint c = Constraint::none) {
  prior.validate();
  BreaseParams p;
  p.theta0 = sample_beta(prior.mu0 * prior.n0, (1.0 - prior.mu0) * prior.n0, rng);
  p.eta_e = c == Constraint::no_benefit ? 0.0 : sample_beta(prior.mue * prior.ne, (1.0 - prior.mue) * prior.ne, rng);
  p.eta_s = c == Constraint::no_harm ? 0.0 : sample_beta(prior.mus * prior.ns, (1.0 - prior.mus) * prior.ns, rng);
  return p;
}

}  // namespace brease

#endif  // BREASE_MODEL_HPP
