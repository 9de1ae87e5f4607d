#ifndef BREASE_SUMMARIES_HPP
#define BREASE_SUMMARIES_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "brease/comparators.hpp"
#include "brease/evidence.hpp"
#include "brease/samplers.hpp"

namespace brease {

enum class Estimand { theta0, theta1, eta_e, eta_s, risk_ratio, risk_difference, vaccine_efficacy };

inline const char* to_string(Estimand e) {
  switch (e) {
    case Estimand::theta0: return "theta0";
    case Estimand::theta1: return "theta1";
    case Estimand::eta_e: return "eta_e";
    case Estimand::eta_s: return "eta_s";
    case Estimand::risk_ratio: return "risk_ratio";
    case Estimand::risk_difference: return "risk_difference";
    case Estimand::vaccine_efficacy: return "vaccine_efficacy";
  }
  return "?";
}

inline constexpr Estimand kAllEstimands[] = {Estimand::theta0,     Estimand::theta1,          Estimand::eta_e,
                                             Estimand::eta_s,      Estimand::risk_ratio,      Estimand::risk_difference,
                                             Estimand::vaccine_efficacy};

inline bool is_ratio(Estimand e) { return e == Estimand::risk_ratio || e == Estimand::vaccine_efficacy; }

inline double estimand_value(double theta0, double theta1, Estimand e) {
  switch (e) {
    case Estimand::theta0: return theta0;
    case Estimand::theta1: return theta1;
    case Estimand::risk_ratio: return theta1 / theta0;
    case Estimand::risk_difference: return theta1 - theta0;
    case Estimand::vaccine_efficacy: return 1.0 - theta1 / theta0;
    default: throw DomainError(std::string("estimand ") + to_string(e) + " needs BREASE parameters");
  }
}

inline double estimand_value(const BreaseParams& p, Estimand e) {
  if (e == Estimand::eta_e) return p.eta_e;
  if (e == Estimand::eta_s) return p.eta_s;
  return estimand_value(p.theta0, p.theta1(), e);
}

struct EstimandSummary {
  Estimand estimand;
  double median;
  double cri_low;
  double cri_high;
  double level;
  std::size_t n_draws;
};

// Linear interpolation between order statistics (sample quantile type 7).
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw DomainError("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline EstimandSummary summarize_values(std::vector<double> values, Estimand e, double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("credible level must lie in (0,1)");
  if (values.size() < 100) throw DomainError("summaries need at least 100 draws");
  std::sort(values.begin(), values.end());
  const double tail = 0.5 * (1.0 - level);
  return {e, quantile_sorted(values, 0.5), quantile_sorted(values, tail), quantile_sorted(values, 1.0 - tail), level,
          values.size()};
}

/// Posterior median and equal-tailed interval of an estimand over a draw set.
inline EstimandSummary summarize(const DrawSet& draws, Estimand e, double level = 0.95) {
  std::vector<double> v;
  v.reserve(draws.size());
  for (const auto& d : draws.draws) {
    if (is_ratio(e) && d.theta0 == 0.0) throw DomainError("ratio estimand undefined for a draw with theta0 = 0");
    v.push_back(estimand_value(d, e));
  }
  return summarize_values(std::move(v), e, level);
}

inline EstimandSummary summarize(const std::vector<RiskDraw>& draws, Estimand e, double level = 0.95) {
  std::vector<double> v;
  v.reserve(draws.size());
  for (const auto& d : draws) {
    if (is_ratio(e) && d.theta0 == 0.0) throw DomainError("ratio estimand undefined for a draw with theta0 = 0");
    v.push_back(estimand_value(d.theta0, d.theta1, e));
  }
  return summarize_values(std::move(v), e, level);
}

inline EstimandSummary summarize(const LtDraws& draws, Estimand e, double level = 0.95) {
  std::vector<RiskDraw> r;
  r.reserve(draws.draws.size());
  for (const auto& d : draws.draws) r.push_back({d.theta0, d.theta1});
  return summarize(r, e, level);
}

// ---------------------------------------------------------------------------
// Distribution comparisons

inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DomainError("KS statistic needs two non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

template <class Cdf>
double ks_one_sample(std::vector<double> x, Cdf&& cdf) {
  if (x.empty()) throw DomainError("KS statistic needs a non-empty sample");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

// Asymptotic p-value of a two-sided one-sample KS statistic.
inline double ks_p_value(double d, std::size_t n) {
  const double en = std::sqrt(static_cast<double>(n));
  const double lambda = (en + 0.12 + 0.11 / en) * d;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-12) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

/// Total-variation distance between the histogram of `values` over `bins`
/// equal bins on [lo, hi] and a reference distribution given by its bin
/// masses. Values outside [lo, hi] count fully against the histogram.
template <class BinMass>
double histogram_tv(const std::vector<double>& values, double lo, double hi, std::size_t bins, BinMass&& mass) {
  if (values.empty() || bins == 0 || !(hi > lo)) throw DomainError("histogram_tv needs values, bins and lo < hi");
  std::vector<double> count(bins, 0.0);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (double v : values) {
    if (v < lo || v >= hi) continue;
    count[std::min(bins - 1, static_cast<std::size_t>((v - lo) / width))] += 1.0;
  }
  const double n = static_cast<double>(values.size());
  double tv = 0.0;
  double inside_hist = 0.0;
  double inside_ref = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    const double m = mass(lo + width * static_cast<double>(b), lo + width * static_cast<double>(b + 1));
    tv += std::abs(count[b] / n - m);
    inside_hist += count[b] / n;
    inside_ref += m;
  }
  tv += std::abs((1.0 - inside_hist) - (1.0 - inside_ref));
  return 0.5 * tv;
}

// ---------------------------------------------------------------------------
// Sensitivity grids

enum class PriorField { mu0, mue, mus, n0, ne, ns };

inline const char* to_string(PriorField f) {
  switch (f) {
    case PriorField::mu0: return "mu0";
    case PriorField::mue: return "mue";
    case PriorField::mus: return "mus";
    case PriorField::n0: return "n0";
    case PriorField::ne: return "ne";
    case PriorField::ns: return "ns";
  }
  return "?";
}

inline PriorField prior_field_from_string(const std::string& s) {
  for (PriorField f : {PriorField::mu0, PriorField::mue, PriorField::mus, PriorField::n0, PriorField::ne, PriorField::ns})
    if (s == to_string(f)) return f;
  throw DomainError("unknown prior field '" + s + "'");
}

inline double& field_ref(BreasePrior& p, PriorField f) {
  switch (f) {
    case PriorField::mu0: return p.mu0;
    case PriorField::mue: return p.mue;
    case PriorField::mus: return p.mus;
    case PriorField::n0: return p.n0;
    case PriorField::ne: return p.ne;
    case PriorField::ns: return p.ns;
  }
  return p.mu0;
}

struct GridAxis {
  PriorField field;
  std::vector<double> values;
};

/// Evidence of one analytic model at a prior.
inline LogEvidence analytic_evidence(const TrialData& data, const BreasePrior& prior, Model m) {
  switch (m) {
    case Model::M0: return log_ml_m0(data, prior);
    case Model::M1: return log_ml_m1(data, prior);
    case Model::M_minus_mono: return log_ml_monotone(data, prior, Constraint::no_harm);
    case Model::M_plus_mono: return log_ml_monotone(data, prior, Constraint::no_benefit);
    case Model::H0_aggregated: return log_ml_h0_aggregated(data, aggregated_from(prior));
    default: throw DomainError(std::string("model ") + to_string(m) + " has no analytic evidence for a grid");
  }
}

// Jeffreys bands on the numerator-vs-denominator Bayes factor.
inline std::string jeffreys_band(double log_bf) {
  const double a = std::abs(log_bf);
  const char* strength = a >= std::log(10.0) ? "strong" : (a >= std::log(3.0) ? "moderate" : "weak");
  return std::string(strength) + (log_bf >= 0.0 ? "_for_num" : "_for_den");
}

struct GridPoint {
  double value1;
  double value2;
  double log_bf;
  double bf;
  std::string band;
};

struct SensitivityGrid {
  PriorField field1;
  PriorField field2;
  Model num;
  Model den;
  std::vector<GridPoint> points;  // axis-1 major order
};

inline GridPoint evaluate_grid_point(const TrialData& data, BreasePrior prior, PriorField f1, double v1, PriorField f2,
                                     double v2, Model num, Model den) {
  field_ref(prior, f1) = v1;
  field_ref(prior, f2) = v2;
  prior.validate();
  const auto bf = bayes_factor(analytic_evidence(data, prior, num), analytic_evidence(data, prior, den));
  return {v1, v2, bf.log_bf, bf.bf, jeffreys_band(bf.log_bf)};
}

inline SensitivityGrid sensitivity_grid(const TrialData& data, const BreasePrior& base, const GridAxis& axis1,
                                        const GridAxis& axis2, Model num = Model::M1, Model den = Model::M0) {
  if (axis1.values.empty() || axis2.values.empty()) throw DomainError("sensitivity axes must be non-empty");
  SensitivityGrid g{axis1.field, axis2.field, num, den, {}};
  g.points.reserve(axis1.values.size() * axis2.values.size());
  for (double v1 : axis1.values)
    for (double v2 : axis2.values)
      g.points.push_back(evaluate_grid_point(data, base, axis1.field, v1, axis2.field, v2, num, den));
  return g;
}

}  // namespace brease

#endif  // BREASE_SUMMARIES_HPP
