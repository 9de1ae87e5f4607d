#ifndef BREASE_COMPARATORS_HPP
#define BREASE_COMPARATORS_HPP

// Baselines: independent beta priors on the two risks (IB) and normal priors
// on the logit-transformed risks (LT).

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "brease/evidence.hpp"
#include "brease/numerics.hpp"
#include "brease/trial_data.hpp"

namespace brease {

enum class Hypothesis { H0, H1 };

struct RiskDraw {
  double theta0;
  double theta1;
};

// ---------------------------------------------------------------------------
// IB

struct IbPrior {
  double a0 = 1.0;
  double b0 = 1.0;
  double a1 = 1.0;
  double b1 = 1.0;

  void validate() const {
    for (double v : {a0, b0, a1, b1})
      if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("IB prior parameters must be positive");
  }
};

inline std::vector<RiskDraw> ib_posterior_sample(const TrialData& data, const IbPrior& prior, std::int64_t t,
                                                 std::uint64_t seed) {
  require_valid(data);
  prior.validate();
  if (t < 1) throw DomainError("draw count must be at least 1");
  RngStream rng(seed);
  std::vector<RiskDraw> out;
  out.reserve(static_cast<std::size_t>(t));
  const double a0 = prior.a0 + static_cast<double>(data.y0);
  const double b0 = prior.b0 + static_cast<double>(data.N0 - data.y0);
  const double a1 = prior.a1 + static_cast<double>(data.y1);
  const double b1 = prior.b1 + static_cast<double>(data.N1 - data.y1);
  for (std::int64_t i = 0; i < t; ++i) {
    const double t0 = sample_beta(a0, b0, rng);
    out.push_back({t0, sample_beta(a1, b1, rng)});
  }
  return out;
}

inline LogEvidence ib_log_ml(const TrialData& data, const IbPrior& prior) {
  require_valid(data);
  prior.validate();
  const double v = log_choose(data.N0, data.y0) + log_choose(data.N1, data.y1) +
                   log_beta(prior.a0 + static_cast<double>(data.y0), prior.b0 + static_cast<double>(data.N0 - data.y0)) -
                   log_beta(prior.a0, prior.b0) +
                   log_beta(prior.a1 + static_cast<double>(data.y1), prior.b1 + static_cast<double>(data.N1 - data.y1)) -
                   log_beta(prior.a1, prior.b1);
  return {v, Model::IB_H1, 0.0, fingerprint(data)};
}

/// Symmetric IB(a, a; a, a) evidences. Under H0 the common risk follows
/// Beta(2a - 1, 2a - 1), the conditional of IB at theta0 = theta1.
inline LogEvidence ib_log_ml(const TrialData& data, double a, Hypothesis h) {
  if (!(a > 0.5) || !std::isfinite(a)) throw DomainError("IB Bayes factor needs a > 1/2");
  if (h == Hypothesis::H1) return ib_log_ml(data, IbPrior{a, a, a, a});
  require_valid(data);
  const double c = 2.0 * a - 1.0;
  const double v = log_choose(data.N0, data.y0) + log_choose(data.N1, data.y1) +
                   log_beta(c + static_cast<double>(data.events()), c + static_cast<double>(data.N() - data.events())) -
                   log_beta(c, c);
  return {v, Model::IB_H0, 0.0, fingerprint(data)};
}

// Savage-Dickey Bayes factor of IB(a, a; a, a) against theta0 = theta1.
inline double ib_bf10(const TrialData& data, double a) {
  return std::exp(ib_log_ml(data, a, Hypothesis::H1).log_ml - ib_log_ml(data, a, Hypothesis::H0).log_ml);
}

// ---------------------------------------------------------------------------
// LT: logit theta0 = beta - psi/2, logit theta1 = beta + psi/2.

struct LtPrior {
  double mu_beta = 0.0;
  double mu_psi = 0.0;
  double sigma_beta = 1.0;
  double sigma_psi = 1.0;

  void validate() const {
    if (!(sigma_beta > 0.0) || !(sigma_psi > 0.0) || !std::isfinite(sigma_beta) || !std::isfinite(sigma_psi))
      throw DomainError("LT prior scales must be positive");
    if (!std::isfinite(mu_beta) || !std::isfinite(mu_psi)) throw DomainError("LT prior means must be finite");
  }
};

inline double inv_logit(double x) { return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

namespace detail {

inline double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

inline double log_normal_pdf(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return -0.5 * z * z - std::log(sigma) - 0.5 * std::log(2.0 * M_PI);
}

// Binomial log likelihood of one arm on the logit scale, with derivatives.
struct ArmTerm {
  double value;
  double grad;
  double hess;
};

inline ArmTerm logit_arm(std::int64_t y, std::int64_t n, double eta) {
  const double dy = static_cast<double>(y);
  const double dn = static_cast<double>(n);
  const double p = inv_logit(eta);
  return {dy * eta - dn * softplus(eta), dy - dn * p, -dn * p * (1.0 - p)};
}

struct LtState {
  double value;
  std::array<double, 2> grad;
  std::array<std::array<double, 2>, 2> hess;
};

// Log posterior kernel on (beta, psi); under H0 psi is pinned at 0.
inline LtState lt_log_kernel(const TrialData& d, const LtPrior& pr, double beta, double psi, bool h1) {
  const ArmTerm a0 = logit_arm(d.y0, d.N0, beta - 0.5 * psi);
  const ArmTerm a1 = logit_arm(d.y1, d.N1, beta + 0.5 * psi);
  LtState s{};
  s.value = a0.value + a1.value + log_normal_pdf(beta, pr.mu_beta, pr.sigma_beta);
  s.grad[0] = a0.grad + a1.grad - (beta - pr.mu_beta) / (pr.sigma_beta * pr.sigma_beta);
  s.hess[0][0] = a0.hess + a1.hess - 1.0 / (pr.sigma_beta * pr.sigma_beta);
  if (h1) {
    s.value += log_normal_pdf(psi, pr.mu_psi, pr.sigma_psi);
    s.grad[1] = 0.5 * (a1.grad - a0.grad) - (psi - pr.mu_psi) / (pr.sigma_psi * pr.sigma_psi);
    s.hess[0][1] = s.hess[1][0] = 0.5 * (a1.hess - a0.hess);
    s.hess[1][1] = 0.25 * (a0.hess + a1.hess) - 1.0 / (pr.sigma_psi * pr.sigma_psi);
  }
  return s;
}

struct LtMode {
  std::array<double, 2> x;
  std::array<std::array<double, 2>, 2> chol;  // lower Cholesky factor of the inverse negative Hessian
  double log_det_chol;
  double value;
};

inline LtMode lt_find_mode(const TrialData& d, const LtPrior& pr, bool h1) {
  const double pooled = (static_cast<double>(d.events()) + 0.5) / (static_cast<double>(d.N()) + 1.0);
  std::array<double, 2> x{std::log(pooled / (1.0 - pooled)), 0.0};
  if (d.N() == 0) x = {pr.mu_beta, h1 ? pr.mu_psi : 0.0};
  LtState s = lt_log_kernel(d, pr, x[0], x[1], h1);
  bool converged = false;
  for (int it = 0; it < 200; ++it) {
    std::array<double, 2> step{};
    if (h1) {
      const double a = -s.hess[0][0], b = -s.hess[0][1], c = -s.hess[1][1];
      const double det = a * c - b * b;
      step = {(c * s.grad[0] - b * s.grad[1]) / det, (a * s.grad[1] - b * s.grad[0]) / det};
    } else {
      step = {s.grad[0] / -s.hess[0][0], 0.0};
    }
    // Backtracking keeps each step an ascent step.
    double scale = 1.0;
    LtState next{};
    for (int k = 0; k < 60; ++k) {
      next = lt_log_kernel(d, pr, x[0] + scale * step[0], x[1] + scale * step[1], h1);
      if (next.value >= s.value - 1e-12 * std::abs(s.value)) break;
      scale *= 0.5;
    }
    x = {x[0] + scale * step[0], x[1] + scale * step[1]};
    s = next;
    if (std::abs(scale * step[0]) + std::abs(scale * step[1]) < 1e-10 * (1.0 + std::abs(x[0]) + std::abs(x[1]))) {
      converged = true;
      break;
    }
  }
  if (!converged) throw NumericError("LT mode search did not converge in 200 Newton iterations");
  LtMode m{};
  m.x = x;
  m.value = s.value;
  if (h1) {
    // Inverse of the negative Hessian, then its Cholesky factor.
    const double a = -s.hess[0][0], b = -s.hess[0][1], c = -s.hess[1][1];
    const double det = a * c - b * b;
    if (!(det > 0.0) || !(a > 0.0)) throw NumericError("LT posterior Hessian is not negative definite at the mode");
    const double s00 = c / det, s01 = -b / det, s11 = a / det;
    const double l00 = std::sqrt(s00);
    const double l10 = s01 / l00;
    const double l11 = std::sqrt(s11 - l10 * l10);
    m.chol = {{{l00, 0.0}, {l10, l11}}};
    m.log_det_chol = std::log(l00) + std::log(l11);
  } else {
    const double l00 = 1.0 / std::sqrt(-s.hess[0][0]);
    m.chol = {{{l00, 0.0}, {0.0, 0.0}}};
    m.log_det_chol = std::log(l00);
  }
  return m;
}

// Gauss-Hermite rule for weight exp(-t^2), nodes by Newton on the orthonormal recurrence.
struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> log_weights;

  explicit GaussHermite(int n) : nodes(static_cast<std::size_t>(n)), log_weights(static_cast<std::size_t>(n)) {
    const double pim4 = std::pow(M_PI, -0.25);
    const int m = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
      if (i == 0) z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
      else if (i == 1) z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
      else if (i == 2) z = 1.86 * z - 0.86 * nodes[0];
      else if (i == 3) z = 1.91 * z - 0.91 * nodes[1];
      else z = 2.0 * z - nodes[static_cast<std::size_t>(i - 2)];
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p1 = pim4;
        double p2 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double p3 = p2;
          p2 = p1;
          p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
        }
        pp = std::sqrt(2.0 * n) * p2;
        const double dz = p1 / pp;
        z -= dz;
        if (std::abs(dz) < 1e-15 * std::max(1.0, std::abs(z))) break;
      }
      const auto lo = static_cast<std::size_t>(i);
      const auto hi = static_cast<std::size_t>(n - 1 - i);
      nodes[lo] = z;
      nodes[hi] = -z;
      log_weights[lo] = log_weights[hi] = std::log(2.0) - 2.0 * std::log(std::abs(pp));
    }
  }
};

}  // namespace detail

/// LT evidence by mode-centred Gauss-Hermite quadrature, doubling the node
/// count until successive estimates agree to 1e-9 in log scale.
inline LogEvidence lt_log_ml(const TrialData& data, const LtPrior& prior, Hypothesis h) {
  require_valid(data);
  prior.validate();
  const bool h1 = h == Hypothesis::H1;
  const auto mode = detail::lt_find_mode(data, prior, h1);
  const double coef = log_choose(data.N0, data.y0) + log_choose(data.N1, data.y1);
  const auto& L = mode.chol;
  auto estimate = [&](int n) {
    const detail::GaussHermite gh(n);
    std::vector<double> terms;
    const double r2 = std::sqrt(2.0);
    for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
      const double zi = r2 * gh.nodes[i];
      if (!h1) {
        const double b = mode.x[0] + L[0][0] * zi;
        terms.push_back(gh.log_weights[i] + gh.nodes[i] * gh.nodes[i] +
                        detail::lt_log_kernel(data, prior, b, 0.0, false).value - mode.value);
        continue;
      }
      for (std::size_t j = 0; j < gh.nodes.size(); ++j) {
        const double zj = r2 * gh.nodes[j];
        const double b = mode.x[0] + L[0][0] * zi;
        const double p = mode.x[1] + L[1][0] * zi + L[1][1] * zj;
        terms.push_back(gh.log_weights[i] + gh.log_weights[j] + gh.nodes[i] * gh.nodes[i] + gh.nodes[j] * gh.nodes[j] +
                        detail::lt_log_kernel(data, prior, b, p, true).value - mode.value);
      }
    }
    const double dim = h1 ? 2.0 : 1.0;
    return mode.value + mode.log_det_chol + 0.5 * dim * std::log(2.0) + log_sum_exp(terms);
  };
  double prev = estimate(16);
  for (int n = 32; n <= 256; n *= 2) {
    const double cur = estimate(n);
    if (std::abs(cur - prev) < 1e-9) return {coef + cur, h1 ? Model::LT_H1 : Model::LT_H0, 0.0, fingerprint(data)};
    prev = cur;
  }
  throw NumericError("LT evidence quadrature did not converge (last change above 1e-9 at 256 nodes)");
}

inline double lt_bf10(const TrialData& data, const LtPrior& prior) {
  return std::exp(lt_log_ml(data, prior, Hypothesis::H1).log_ml - lt_log_ml(data, prior, Hypothesis::H0).log_ml);
}

struct LtDraw {
  double beta;
  double psi;
  double theta0;
  double theta1;
};

struct LtDraws {
  std::vector<LtDraw> draws;
  double acceptance_rate = 0.0;
};

/// Independence Metropolis with a multivariate-t (8 df) proposal built from
/// the Laplace approximation at the posterior mode.
inline LtDraws lt_posterior_sample(const TrialData& data, const LtPrior& prior, std::int64_t t, std::int64_t burn_in,
                                   std::uint64_t seed) {
  require_valid(data);
  prior.validate();
  if (burn_in < 0 || t <= burn_in) throw DomainError("LT sampling needs t > burn_in >= 0");
  constexpr double nu = 8.0;
  const auto mode = detail::lt_find_mode(data, prior, true);
  const auto& L = mode.chol;
  RngStream rng(seed);
  // Proposal log density up to a constant, as a function of the standardized point.
  auto log_q = [&](double z0, double z1) { return -0.5 * (nu + 2.0) * std::log1p((z0 * z0 + z1 * z1) / nu); };
  auto propose = [&](double& z0, double& z1) {
    const double w = std::sqrt(nu / (2.0 * sample_gamma(0.5 * nu, 1.0, rng)));
    z0 = rng.normal() * w;
    z1 = rng.normal() * w;
  };
  double b = mode.x[0], p = mode.x[1];
  double lp = detail::lt_log_kernel(data, prior, b, p, true).value;
  double lq = log_q(0.0, 0.0);
  std::int64_t accepted = 0;
  LtDraws out;
  out.draws.reserve(static_cast<std::size_t>(t - burn_in));
  for (std::int64_t i = 0; i < t; ++i) {
    double n0, n1;
    propose(n0, n1);
    const double nb = mode.x[0] + L[0][0] * n0;
    const double np = mode.x[1] + L[1][0] * n0 + L[1][1] * n1;
    const double nlp = detail::lt_log_kernel(data, prior, nb, np, true).value;
    const double nlq = log_q(n0, n1);
    if (std::log(rng.uniform()) < (nlp - lp) - (nlq - lq)) {
      b = nb;
      p = np;
      lp = nlp;
      lq = nlq;
      if (i >= burn_in) ++accepted;
    }
    if (i >= burn_in) out.draws.push_back({b, p, inv_logit(b - 0.5 * p), inv_logit(b + 0.5 * p)});
  }
  out.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(t - burn_in);
  return out;
}

}  // namespace brease

#endif  // BREASE_COMPARATORS_HPP
