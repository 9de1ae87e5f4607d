#ifndef BREASE_SAMPLERS_HPP
#define BREASE_SAMPLERS_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "brease/mixture.hpp"
#include "brease/model.hpp"
#include "brease/numerics.hpp"
#include "brease/trial_data.hpp"

namespace brease {

enum class SamplerMethod { exact, gibbs };

inline const char* to_string(SamplerMethod m) { return m == SamplerMethod::exact ? "exact" : "gibbs"; }

struct DrawMeta {
  std::uint64_t seed = 0;
  SamplerMethod method = SamplerMethod::exact;
  std::int64_t burn_in = 0;
  Constraint constraint = Constraint::none;
  BreasePrior prior;
};

struct DrawSet {
  std::vector<BreaseParams> draws;
  DrawMeta meta;

  std::size_t size() const { return draws.size(); }

  std::vector<double> column(double (*f)(const BreaseParams&)) const {
    std::vector<double> out;
    out.reserve(draws.size());
    for (const auto& d : draws) out.push_back(f(d));
    return out;
  }
};

namespace detail {

inline BreaseParams draw_component(const MixtureComponent& m, Constraint c, RngStream& rng) {
  BreaseParams p;
  p.theta0 = sample_beta(m.theta0.a, m.theta0.b, rng);
  p.eta_e = c == Constraint::no_benefit ? 0.0 : sample_beta(m.eta_e.a, m.eta_e.b, rng);
  p.eta_s = c == Constraint::no_harm ? 0.0 : sample_beta(m.eta_s.a, m.eta_s.b, rng);
  return p;
}

// p / q with the 0/0 = 0 limit, clamped into [0,1] against rounding.
inline double safe_ratio(double p, double q) {
  if (p <= 0.0) return 0.0;
  if (q <= 0.0) return 1.0;
  return std::clamp(p / q, 0.0, 1.0);
}

}  // namespace detail

/// Exact i.i.d. posterior sampler. Holds the mixture table so repeated calls
/// on the same (data, prior) skip the weight computation.
class ExactSampler {
 public:
  ExactSampler(const TrialData& data, const BreasePrior& prior, Constraint constraint = Constraint::none)
      : table_(data, prior, constraint) {}

  const MixtureTable& table() const { return table_; }

  BreaseParams draw(RngStream& rng) const {
    const auto cc = table_.sample_counts(rng);
    return detail::draw_component(table_.component(cc.c1, cc.p1), table_.constraint(), rng);
  }

  DrawSet sample(std::int64_t t, std::uint64_t seed) const {
    if (t < 1) throw DomainError("draw count must be at least 1");
    RngStream rng(seed);
    DrawSet out;
    out.meta = {seed, SamplerMethod::exact, 0, table_.constraint(), table_.prior()};
    out.draws.reserve(static_cast<std::size_t>(t));
    for (std::int64_t i = 0; i < t; ++i) out.draws.push_back(draw(rng));
    return out;
  }

 private:
  MixtureTable table_;
};

inline DrawSet exact_sample(const TrialData& data, const BreasePrior& prior, std::int64_t t, std::uint64_t seed,
                            Constraint constraint = Constraint::none) {
  return ExactSampler(data, prior, constraint).sample(t, seed);
}

/// One data-augmentation sweep: latent counts given the parameters, then the
/// conjugate beta update given the counts. Shared by the hierarchical sampler.
inline BreaseParams gibbs_step(const TrialData& data, const BreasePrior& prior, const BreaseParams& cur,
                               Constraint constraint, RngStream& rng) {
  const double t1 = cur.theta1();
  std::int64_t c1 = 0;
  std::int64_t p1 = 0;
  if (constraint != Constraint::no_harm)
    c1 = sample_binomial(data.y1, detail::safe_ratio((1.0 - cur.theta0) * cur.eta_s, t1), rng);
  if (constraint != Constraint::no_benefit)
    p1 = sample_binomial(data.N1 - data.y1, detail::safe_ratio(cur.theta0 * cur.eta_e, 1.0 - t1), rng);
  const double N = static_cast<double>(data.N());
  const double k = static_cast<double>(data.y0 + data.y1 - c1 + p1);
  const double f1 = static_cast<double>(data.N1 - data.y1);
  const MixtureComponent m{
      {k + prior.mu0 * prior.n0, N - k + (1.0 - prior.mu0) * prior.n0},
      {static_cast<double>(p1) + prior.mue * prior.ne, static_cast<double>(data.y1 - c1) + (1.0 - prior.mue) * prior.ne},
      {static_cast<double>(c1) + prior.mus * prior.ns, f1 - static_cast<double>(p1) + (1.0 - prior.mus) * prior.ns}};
  return detail::draw_component(m, constraint, rng);
}

/// Gibbs sampler over `t` total iterations; the first `burn_in` are discarded.
inline DrawSet gibbs_sample(const TrialData& data, const BreasePrior& prior, std::int64_t t, std::int64_t burn_in,
                            BreaseParams init, std::uint64_t seed, Constraint constraint = Constraint::none) {
  require_valid(data);
  prior.validate();
  if (burn_in < 0 || t <= burn_in) throw DomainError("gibbs_sample needs t > burn_in >= 0");
  if (constraint == Constraint::no_harm) init.eta_s = 0.0;
  if (constraint == Constraint::no_benefit) init.eta_e = 0.0;
  for (double v : {init.theta0, constraint == Constraint::no_benefit ? 0.5 : init.eta_e,
                   constraint == Constraint::no_harm ? 0.5 : init.eta_s})
    if (!(v > 0.0 && v < 1.0)) throw DomainError("gibbs_sample init must lie strictly inside (0,1)");
  RngStream rng(seed);
  DrawSet out;
  out.meta = {seed, SamplerMethod::gibbs, burn_in, constraint, prior};
  out.draws.reserve(static_cast<std::size_t>(t - burn_in));
  BreaseParams cur = init;
  for (std::int64_t i = 0; i < t; ++i) {
    cur = gibbs_step(data, prior, cur, constraint, rng);
    if (i >= burn_in) out.draws.push_back(cur);
  }
  return out;
}

inline DrawSet sample_monotone(const TrialData& data, const BreasePrior& prior, Constraint constraint,
                               SamplerMethod method, std::int64_t t, std::int64_t burn_in, std::uint64_t seed) {
  if (constraint == Constraint::none) throw DomainError("sample_monotone needs no_harm or no_benefit");
  if (method == SamplerMethod::exact) return exact_sample(data, prior, t, seed, constraint);
  return gibbs_sample(data, prior, t, burn_in, BreaseParams{}, seed, constraint);
}

// ---------------------------------------------------------------------------
// Aggregated-Dirichlet null model: theta0 = theta1, with the preventive and
// causal cells merged into p10* = p10 + p01 and split evenly.

struct AggregatedPrior {
  double mue = 0.5;
  double mus = 0.5;
  double ne = 1.0;
  double ns = 1.0;

  void validate() const {
    for (double m : {mue, mus})
      if (!(m > 0.0 && m < 1.0)) throw DomainError("aggregated prior means must lie in (0,1)");
    for (double n : {ne, ns})
      if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("aggregated prior sizes must be positive");
  }
  // Dirichlet concentrations on (p00, p10*, p11).
  std::array<double, 3> concentrations() const {
    return {(1.0 - mus) * ns, mue * ne + mus * ns, (1.0 - mue) * ne};
  }
};

inline AggregatedPrior aggregated_from(const BreasePrior& p) { return {p.mue, p.mus, p.ne, p.ns}; }

struct AggregatedCounts {
  std::int64_t w0 = 0;  // events attributed to the merged cell
  std::int64_t w1 = 0;  // non-events attributed to the merged cell
};

struct AggregatedDraw {
  double p00;
  double p10s;
  double p11;
  double theta0;  // equals theta1
  double eta_e;
  double eta_s;
};

namespace detail {

inline std::array<double, 3> aggregated_posterior(const TrialData& d, const AggregatedPrior& pr, AggregatedCounts w) {
  const auto c = pr.concentrations();
  const double y = static_cast<double>(d.events());
  const double f = static_cast<double>(d.N() - d.events());
  return {f - static_cast<double>(w.w1) + c[0], static_cast<double>(w.w0 + w.w1) + c[1], y - static_cast<double>(w.w0) + c[2]};
}

inline double aggregated_log_weight(const TrialData& d, const AggregatedPrior& pr, std::int64_t w0, std::int64_t w1) {
  const auto a = aggregated_posterior(d, pr, {w0, w1});
  return -static_cast<double>(w0 + w1) * std::log(2.0) + log_choose(d.events(), w0) +
         log_choose(d.N() - d.events(), w1) + log_beta3(a[0], a[1], a[2]);
}

inline AggregatedDraw finish_aggregated(const std::vector<double>& p) {
  AggregatedDraw d{p[0], p[1], p[2], 0.5 * p[1] + p[2], 0.0, 0.0};
  d.eta_e = safe_ratio(p[1], p[1] + 2.0 * p[2]);
  d.eta_s = safe_ratio(p[1], p[1] + 2.0 * p[0]);
  return d;
}

}  // namespace detail

inline LogWeightGrid aggregated_weight_grid(const TrialData& data, const AggregatedPrior& prior) {
  require_valid(data);
  prior.validate();
  const std::int64_t rows = data.events() + 1;
  const std::int64_t cols = data.N() - data.events() + 1;
  std::vector<double> logw(static_cast<std::size_t>(rows * cols));
  for (std::int64_t r = 0; r < rows; ++r)
    for (std::int64_t c = 0; c < cols; ++c)
      logw[static_cast<std::size_t>(r * cols + c)] = detail::aggregated_log_weight(data, prior, r, c);
  return LogWeightGrid(rows, cols, std::move(logw));
}

inline std::vector<AggregatedDraw> sample_h0_aggregated(const TrialData& data, const AggregatedPrior& prior,
                                                        SamplerMethod method, std::int64_t t, std::int64_t burn_in,
                                                        std::uint64_t seed) {
  require_valid(data);
  prior.validate();
  if (t < 1) throw DomainError("draw count must be at least 1");
  RngStream rng(seed);
  std::vector<AggregatedDraw> out;
  if (method == SamplerMethod::exact) {
    const auto grid = aggregated_weight_grid(data, prior);
    out.reserve(static_cast<std::size_t>(t));
    for (std::int64_t i = 0; i < t; ++i) {
      const auto [w0, w1] = grid.sample(rng);
      const auto a = detail::aggregated_posterior(data, prior, {w0, w1});
      out.push_back(detail::finish_aggregated(sample_dirichlet(a, rng)));
    }
    return out;
  }
  if (burn_in < 0 || t <= burn_in) throw DomainError("gibbs sampling needs t > burn_in >= 0");
  out.reserve(static_cast<std::size_t>(t - burn_in));
  std::vector<double> p{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  const std::int64_t y = data.events();
  const std::int64_t f = data.N() - y;
  for (std::int64_t i = 0; i < t; ++i) {
    const std::int64_t w0 = sample_binomial(y, detail::safe_ratio(p[1], p[1] + 2.0 * p[2]), rng);
    const std::int64_t w1 = sample_binomial(f, detail::safe_ratio(p[1], p[1] + 2.0 * p[0]), rng);
    const auto a = detail::aggregated_posterior(data, prior, {w0, w1});
    p = sample_dirichlet(a, rng);
    if (i >= burn_in) out.push_back(detail::finish_aggregated(p));
  }
  return out;
}

}  // namespace brease

#endif  // BREASE_SAMPLERS_HPP
