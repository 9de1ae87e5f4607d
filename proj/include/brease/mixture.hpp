#ifndef BREASE_MIXTURE_HPP
#define BREASE_MIXTURE_HPP

// Posterior mixture over the latent treated-arm counts: C1 "causal" subjects
// among the y1 treated events and P1 "preventive" subjects among the N1 - y1
// treated non-events. Each cell carries independent beta posteriors for
// (theta0, eta_e, eta_s); the same log weights give the marginal likelihood.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "brease/model.hpp"
#include "brease/numerics.hpp"
#include "brease/trial_data.hpp"

namespace brease {

struct CounterfactualCounts {
  std::int64_t c1 = 0;
  std::int64_t p1 = 0;
};

struct MixtureComponent {
  BetaShape theta0;
  BetaShape eta_e;
  BetaShape eta_s;
};

/// Rectangular table of log weights with normalization and inverse-CDF
/// sampling over the flattened cells.
class LogWeightGrid {
 public:
  LogWeightGrid() = default;
  LogWeightGrid(std::int64_t rows, std::int64_t cols, std::vector<double> log_weights)
      : rows_(rows), cols_(cols), logw_(std::move(log_weights)) {
    if (static_cast<std::int64_t>(logw_.size()) != rows_ * cols_) throw DomainError("weight grid size mismatch");
    log_total_ = log_sum_exp(logw_);
    if (!std::isfinite(log_total_)) throw NumericError("mixture weight table is degenerate (all weights zero)");
    cdf_.resize(logw_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < logw_.size(); ++i) {
      acc += std::exp(logw_[i] - log_total_);
      cdf_[i] = acc;
    }
    // Renormalize so the last entry is exactly 1.
    for (double& c : cdf_) c /= acc;
  }

  std::int64_t rows() const { return rows_; }
  std::int64_t cols() const { return cols_; }
  std::size_t size() const { return logw_.size(); }
  double log_total() const { return log_total_; }
  double log_weight(std::int64_t r, std::int64_t c) const { return logw_[static_cast<std::size_t>(r * cols_ + c)]; }
  double probability(std::int64_t r, std::int64_t c) const { return std::exp(log_weight(r, c) - log_total_); }

  std::pair<std::int64_t, std::int64_t> sample(RngStream& rng) const {
    const double u = rng.uniform();
    const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    auto idx = static_cast<std::int64_t>(std::min<std::size_t>(it - cdf_.begin(), cdf_.size() - 1));
    return {idx / cols_, idx % cols_};
  }

 private:
  std::int64_t rows_ = 0;
  std::int64_t cols_ = 0;
  std::vector<double> logw_;
  std::vector<double> cdf_;
  double log_total_ = kNegInf;
};

namespace detail {

// Row r indexes C1 (absent under no_harm), column c indexes P1 (absent under no_benefit).
struct MixtureLayout {
  TrialData data;
  BreasePrior prior;
  Constraint constraint;
  std::int64_t rows;
  std::int64_t cols;
  std::vector<double> log_choose_rows;
  std::vector<double> log_choose_cols;

  MixtureLayout(const TrialData& d, const BreasePrior& p, Constraint c) : data(d), prior(p), constraint(c) {
    require_valid(d);
    p.validate();
    const std::int64_t f1 = d.N1 - d.y1;
    rows = c == Constraint::no_harm ? 1 : d.y1 + 1;
    cols = c == Constraint::no_benefit ? 1 : f1 + 1;
    log_choose_rows.resize(static_cast<std::size_t>(rows));
    log_choose_cols.resize(static_cast<std::size_t>(cols));
    for (std::int64_t r = 0; r < rows; ++r) log_choose_rows[static_cast<std::size_t>(r)] = log_choose(d.y1, r);
    for (std::int64_t q = 0; q < cols; ++q) log_choose_cols[static_cast<std::size_t>(q)] = log_choose(f1, q);
  }

  MixtureComponent component(std::int64_t c1, std::int64_t p1) const {
    const double N = static_cast<double>(data.N());
    const double k = static_cast<double>(data.y0 + data.y1 - c1 + p1);
    const double f1 = static_cast<double>(data.N1 - data.y1);
    const double dc = static_cast<double>(c1);
    const double dp = static_cast<double>(p1);
    return {{k + prior.mu0 * prior.n0, N - k + (1.0 - prior.mu0) * prior.n0},
            {dp + prior.mue * prior.ne, static_cast<double>(data.y1) - dc + (1.0 - prior.mue) * prior.ne},
            {dc + prior.mus * prior.ns, f1 - dp + (1.0 - prior.mus) * prior.ns}};
  }

  double log_weight(std::int64_t c1, std::int64_t p1) const {
    const auto m = component(c1, p1);
    double w = log_choose_rows[static_cast<std::size_t>(c1)] + log_choose_cols[static_cast<std::size_t>(p1)] +
               log_beta(m.theta0.a, m.theta0.b);
    if (constraint != Constraint::no_benefit) w += log_beta(m.eta_e.a, m.eta_e.b);
    if (constraint != Constraint::no_harm) w += log_beta(m.eta_s.a, m.eta_s.b);
    return w;
  }

  // Fills out[0..cols) with row r. Neighbouring cells differ by ratios of
  // gamma functions at unit offsets, so one log per cell suffices; the exact
  // value is recomputed every kAnchor cells to bound the drift.
  void fill_row(std::int64_t r, double* out) const {
    constexpr std::int64_t kAnchor = 256;
    const bool has_e = constraint != Constraint::no_benefit;
    const bool has_s = constraint != Constraint::no_harm;
    double w = 0.0;
    for (std::int64_t q = 0; q < cols; ++q) {
      if (q % kAnchor == 0) {
        w = log_weight(r, q);
      } else {
        const auto m = component(r, q - 1);
        double ratio = m.theta0.a / (m.theta0.b - 1.0);
        if (has_e) ratio *= m.eta_e.a / (m.eta_e.a + m.eta_e.b);
        if (has_s) ratio *= (m.eta_s.a + m.eta_s.b - 1.0) / (m.eta_s.b - 1.0);
        w += std::log(ratio) + log_choose_cols[static_cast<std::size_t>(q)] -
             log_choose_cols[static_cast<std::size_t>(q - 1)];
      }
      out[q] = w;
    }
  }

  // Log normalizer of the prior over the parameters present in the model.
  double log_prior_normalizer() const {
    const auto s0 = prior.theta0();
    double z = log_beta(s0.a, s0.b);
    if (constraint != Constraint::no_benefit) z += log_beta(prior.eta_e().a, prior.eta_e().b);
    if (constraint != Constraint::no_harm) z += log_beta(prior.eta_s().a, prior.eta_s().b);
    return z;
  }

  double log_binomial_coefficients() const { return log_choose(data.N0, data.y0) + log_choose(data.N1, data.y1); }
};

}  // namespace detail

/// Materialized posterior mixture; immutable after construction and safe to
/// share between threads.
class MixtureTable {
 public:
  MixtureTable(const TrialData& data, const BreasePrior& prior, Constraint constraint = Constraint::none)
      : layout_(data, prior, constraint) {
    std::vector<double> logw(static_cast<std::size_t>(layout_.rows * layout_.cols));
    for (std::int64_t r = 0; r < layout_.rows; ++r) layout_.fill_row(r, logw.data() + r * layout_.cols);
    grid_ = LogWeightGrid(layout_.rows, layout_.cols, std::move(logw));
  }

  const TrialData& data() const { return layout_.data; }
  const BreasePrior& prior() const { return layout_.prior; }
  Constraint constraint() const { return layout_.constraint; }
  const LogWeightGrid& grid() const { return grid_; }

  std::int64_t rows() const { return layout_.rows; }
  std::int64_t cols() const { return layout_.cols; }
  double probability(std::int64_t c1, std::int64_t p1) const { return grid_.probability(c1, p1); }
  MixtureComponent component(std::int64_t c1, std::int64_t p1) const { return layout_.component(c1, p1); }

  double log_marginal_likelihood() const {
    return layout_.log_binomial_coefficients() + grid_.log_total() - layout_.log_prior_normalizer();
  }

  CounterfactualCounts sample_counts(RngStream& rng) const {
    const auto [r, c] = grid_.sample(rng);
    return {r, c};
  }

  /// Posterior expectation of g(component, weight-free) summed over cells.
  template <class F>
  double expect(F&& f) const {
    double acc = 0.0;
    for (std::int64_t r = 0; r < rows(); ++r)
      for (std::int64_t q = 0; q < cols(); ++q) acc += probability(r, q) * f(component(r, q));
    return acc;
  }

 private:
  detail::MixtureLayout layout_;
  LogWeightGrid grid_;
};

/// Log marginal likelihood without materializing the table: one row buffer at
/// a time, row sums combined at the end. `reverse` flips the iteration order.
inline double mixture_log_ml(const TrialData& data, const BreasePrior& prior, Constraint constraint,
                             bool reverse = false) {
  const detail::MixtureLayout layout(data, prior, constraint);
  std::vector<double> row(static_cast<std::size_t>(layout.cols));
  std::vector<double> row_sums(static_cast<std::size_t>(layout.rows));
  for (std::int64_t i = 0; i < layout.rows; ++i) {
    const std::int64_t r = reverse ? layout.rows - 1 - i : i;
    layout.fill_row(r, row.data());
    if (reverse) std::reverse(row.begin(), row.end());
    row_sums[static_cast<std::size_t>(i)] = log_sum_exp(row);
  }
  return layout.log_binomial_coefficients() + log_sum_exp(row_sums) - layout.log_prior_normalizer();
}

}  // namespace brease

#endif  // BREASE_MIXTURE_HPP
