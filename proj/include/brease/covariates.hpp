#ifndef BREASE_COVARIATES_HPP
#define BREASE_COVARIATES_HPP

// Discrete covariates: one BREASE parameter triple per stratum, either with
// independent priors or partially pooled through a hierarchical prior.

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "brease/model.hpp"
#include "brease/samplers.hpp"
#include "brease/trial_data.hpp"

namespace brease {

/// theta_{.,x} ~ Beta*(mu, n), mu ~ Beta*(lambda, nu), n ~ Gamma(shape, rate),
/// for each of the three components (0, e, s) in that order.
struct HierarchicalHyperPrior {
  std::array<double, 3> lambda{0.5, 0.5, 0.5};
  std::array<double, 3> nu{10.0, 10.0, 10.0};
  std::array<double, 3> shape{10.0, 10.0, 10.0};
  std::array<double, 3> rate{0.1, 0.1, 0.1};

  void validate() const {
    for (int k = 0; k < 3; ++k) {
      if (!(lambda[k] > 0.0 && lambda[k] < 1.0)) throw DomainError("hyperprior means must lie in (0,1)");
      if (!(nu[k] > 0.0) || !(shape[k] > 0.0) || !(rate[k] > 0.0))
        throw DomainError("hyperprior sizes, shapes and rates must be positive");
    }
  }
};

struct HyperDraw {
  std::array<double, 3> mu;
  std::array<double, 3> n;

  BreasePrior prior() const { return {mu[0], mu[1], mu[2], n[0], n[1], n[2]}; }
};

struct HierarchicalDiagnostics {
  // Order: mu0, mue, mus, n0, ne, ns.
  std::array<double, 6> acceptance{};
  std::array<double, 6> step{};
  std::vector<std::string> warnings;
};

struct StratifiedDraws {
  std::vector<std::string> labels;
  std::vector<DrawSet> strata;
  std::vector<HyperDraw> hyper;  // empty for independent priors
  HierarchicalDiagnostics diagnostics;
};

inline StratifiedDraws stratified_independent(const StratifiedTrialData& data, const std::vector<BreasePrior>& priors,
                                              std::int64_t t, std::uint64_t seed) {
  require_valid(data);
  if (priors.size() != data.strata.size())
    throw DomainError("need one prior per stratum (" + std::to_string(data.strata.size()) + " strata, " +
                      std::to_string(priors.size()) + " priors)");
  const RngStream root(seed);
  StratifiedDraws out;
  for (std::size_t i = 0; i < data.strata.size(); ++i) {
    out.labels.push_back(data.strata[i].label);
    out.strata.push_back(exact_sample(data.strata[i].data, priors[i], t, root.derive(i).seed()));
  }
  return out;
}

namespace detail {

// Log density of the hierarchical block for one component, on (logit mu, log n).
inline double hyper_log_target(const std::vector<double>& x, double mu, double n, double lambda, double nu,
                               double shape, double rate) {
  const double a = mu * n;
  const double b = (1.0 - mu) * n;
  double s = -static_cast<double>(x.size()) * log_beta(a, b);
  for (double v : x) s += (a - 1.0) * std::log(v) + (b - 1.0) * std::log1p(-v);
  s += (lambda * nu) * std::log(mu) + ((1.0 - lambda) * nu) * std::log1p(-mu);  // includes logit Jacobian
  s += shape * std::log(n) - rate * n;                                             // includes log Jacobian
  return s;
}

inline double component_of(const BreaseParams& p, int k) { return k == 0 ? p.theta0 : (k == 1 ? p.eta_e : p.eta_s); }

}  // namespace detail

/// Two-stage sampler: a data-augmentation sweep per stratum given the
/// hyperparameters, then random-walk Metropolis on logit(mu) and log(n).
/// Step sizes adapt toward 0.44 acceptance during burn-in and are frozen after.
inline StratifiedDraws hierarchical_sample(const StratifiedTrialData& data, const HierarchicalHyperPrior& hyper,
                                           std::int64_t t, std::int64_t burn_in, std::uint64_t seed,
                                           std::array<double, 6> step_sizes = {0.3, 0.3, 0.3, 0.3, 0.3, 0.3}) {
  require_valid(data);
  hyper.validate();
  if (burn_in < 0 || t <= burn_in) throw DomainError("hierarchical sampling needs t > burn_in >= 0");
  const std::size_t S = data.strata.size();
  const RngStream root(seed);
  std::vector<RngStream> stratum_rng;
  for (std::size_t i = 0; i < S; ++i) stratum_rng.push_back(root.derive(i + 1));
  RngStream hyper_rng = root.derive(0);

  HyperDraw h;
  for (int k = 0; k < 3; ++k) {
    h.mu[static_cast<std::size_t>(k)] = hyper.lambda[static_cast<std::size_t>(k)];
    h.n[static_cast<std::size_t>(k)] = hyper.shape[static_cast<std::size_t>(k)] / hyper.rate[static_cast<std::size_t>(k)];
  }
  std::vector<BreaseParams> cur(S, BreaseParams{0.5, 0.5, 0.5});

  StratifiedDraws out;
  for (const auto& st : data.strata) out.labels.push_back(st.label);
  out.strata.resize(S);
  for (auto& ds : out.strata) {
    ds.meta = {seed, SamplerMethod::gibbs, burn_in, Constraint::none, h.prior()};
    ds.draws.reserve(static_cast<std::size_t>(t - burn_in));
  }
  out.hyper.reserve(static_cast<std::size_t>(t - burn_in));

  std::array<double, 6> log_step{};
  for (std::size_t j = 0; j < 6; ++j) log_step[j] = std::log(step_sizes[j]);
  std::array<std::int64_t, 6> batch_acc{};
  std::array<std::int64_t, 6> kept_acc{};
  constexpr std::int64_t kBatch = 50;
  std::vector<double> x(S);

  for (std::int64_t it = 0; it < t; ++it) {
    const BreasePrior prior = h.prior();
    for (std::size_t i = 0; i < S; ++i)
      cur[i] = gibbs_step(data.strata[i].data, prior, cur[i], Constraint::none, stratum_rng[i]);

    for (int k = 0; k < 3; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      for (std::size_t i = 0; i < S; ++i) x[i] = detail::component_of(cur[i], k);
      auto target = [&](double mu, double n) {
        return detail::hyper_log_target(x, mu, n, hyper.lambda[ku], hyper.nu[ku], hyper.shape[ku], hyper.rate[ku]);
      };
      double lp = target(h.mu[ku], h.n[ku]);
      // logit(mu) update
      {
        const double z = std::log(h.mu[ku] / (1.0 - h.mu[ku])) + std::exp(log_step[ku]) * hyper_rng.normal();
        const double mu = std::clamp(1.0 / (1.0 + std::exp(-z)), 1e-12, 1.0 - 1e-12);
        const double lq = target(mu, h.n[ku]);
        if (std::log(hyper_rng.uniform()) < lq - lp) {
          h.mu[ku] = mu;
          lp = lq;
          ++batch_acc[ku];
          if (it >= burn_in) ++kept_acc[ku];
        }
      }
      // log(n) update
      {
        const double n = h.n[ku] * std::exp(std::exp(log_step[ku + 3]) * hyper_rng.normal());
        const double lq = target(h.mu[ku], n);
        if (std::log(hyper_rng.uniform()) < lq - lp) {
          h.n[ku] = n;
          ++batch_acc[ku + 3];
          if (it >= burn_in) ++kept_acc[ku + 3];
        }
      }
    }

    if (it < burn_in && (it + 1) % kBatch == 0) {
      const double delta = std::min(0.1, 1.0 / std::sqrt(static_cast<double>((it + 1) / kBatch)));
      for (std::size_t j = 0; j < 6; ++j) {
        const double rate = static_cast<double>(batch_acc[j]) / static_cast<double>(kBatch);
        log_step[j] += rate > 0.44 ? delta : -delta;
        batch_acc[j] = 0;
      }
    }
    if (it >= burn_in) {
      for (std::size_t i = 0; i < S; ++i) out.strata[i].draws.push_back(cur[i]);
      out.hyper.push_back(h);
    }
  }

  static constexpr const char* kNames[6] = {"mu0", "mue", "mus", "n0", "ne", "ns"};
  for (std::size_t j = 0; j < 6; ++j) {
    out.diagnostics.step[j] = std::exp(log_step[j]);
    out.diagnostics.acceptance[j] = static_cast<double>(kept_acc[j]) / static_cast<double>(t - burn_in);
    if (out.diagnostics.acceptance[j] < 0.05 || out.diagnostics.acceptance[j] > 0.95)
      out.diagnostics.warnings.push_back(std::string("acceptance rate for ") + kNames[j] + " outside [0.05, 0.95]: " +
                                         std::to_string(out.diagnostics.acceptance[j]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Population effects

struct PopulationDraw {
  double theta0;
  double theta1;
  double risk_ratio;
  double risk_difference;
};

struct PopulationWeights {
  std::vector<double> p;      // posterior mean of the stratum probabilities
  std::vector<double> delta;  // posterior mean treatment propensity per stratum
};

inline PopulationWeights population_weights(const StratifiedTrialData& data, double concentration = 1.0) {
  require_valid(data);
  PopulationWeights w;
  double total = 0.0;
  for (const auto& st : data.strata) total += static_cast<double>(st.data.N()) + concentration;
  for (const auto& st : data.strata) {
    w.p.push_back((static_cast<double>(st.data.N()) + concentration) / total);
    w.delta.push_back((1.0 + static_cast<double>(st.data.N1)) / (2.0 + static_cast<double>(st.data.N())));
  }
  return w;
}

/// Marginal risks theta_z = sum_x theta_{z,x} p_x with p ~ Dirichlet(c + N_x)
/// drawn afresh for every iteration.
inline std::vector<PopulationDraw> population_effects(const StratifiedDraws& draws,
                                                      const std::vector<std::int64_t>& counts,
                                                      double dirichlet_concentration, std::uint64_t seed) {
  if (counts.size() != draws.strata.size()) throw DomainError("population_effects: strata/count size mismatch");
  if (!(dirichlet_concentration > 0.0)) throw DomainError("Dirichlet concentration must be positive");
  if (draws.strata.empty()) throw DomainError("population_effects: no strata");
  const std::size_t T = draws.strata.front().size();
  for (const auto& ds : draws.strata)
    if (ds.size() != T) throw DomainError("population_effects: strata have unequal draw counts");
  std::vector<double> alpha;
  for (auto c : counts) {
    if (c < 0) throw DomainError("population_effects: negative stratum size");
    alpha.push_back(dirichlet_concentration + static_cast<double>(c));
  }
  RngStream rng(seed);
  std::vector<PopulationDraw> out;
  out.reserve(T);
  for (std::size_t it = 0; it < T; ++it) {
    std::vector<double> p = draws.strata.size() == 1 ? std::vector<double>{1.0} : sample_dirichlet(alpha, rng);
    double t0 = 0.0;
    double t1 = 0.0;
    for (std::size_t x = 0; x < p.size(); ++x) {
      t0 += p[x] * draws.strata[x].draws[it].theta0;
      t1 += p[x] * draws.strata[x].draws[it].theta1();
    }
    out.push_back({t0, t1, t1 / t0, t1 - t0});
  }
  return out;
}

}  // namespace brease

#endif  // BREASE_COVARIATES_HPP
