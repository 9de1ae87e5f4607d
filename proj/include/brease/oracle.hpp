#ifndef BREASE_ORACLE_HPP
#define BREASE_ORACLE_HPP

// Brute-force reference integrals. Everything here works from the raw
// two-arm binomial likelihood and the prior densities; none of the mixture
// or closed-form machinery is used, so agreement is an independent check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "brease/comparators.hpp"
#include "brease/errors.hpp"
#include "brease/model.hpp"
#include "brease/numerics.hpp"
#include "brease/trial_data.hpp"

namespace brease {

struct QuadratureSpec {
  int panels_per_axis = 16;
  double tolerance = 1e-7;
  int max_refinements = 3;

  void validate() const {
    if (panels_per_axis < 16) throw DomainError("oracle needs at least 16 panels per axis");
    if (!(tolerance > 0.0)) throw DomainError("oracle tolerance must be positive");
    if (max_refinements < 1) throw DomainError("oracle needs at least one refinement");
  }
};

enum class OracleModel { M0, M1, no_harm, no_benefit, H0_aggregated };

namespace oracle_detail {

// Probability-weighted nodes for E[g(X)], X ~ Beta(a, b). Nodes live in CDF
// coordinates u = F(x) on panels graded geometrically toward u = 0 and u = 1,
// where the quantile function carries the prior's endpoint behaviour.
struct AxisRule {
  std::vector<double> x;
  std::vector<double> w;
};

inline AxisRule beta_axis(double a, double b, int panels, int nodes_per_panel) {
  const GaussLegendre gl(static_cast<std::size_t>(nodes_per_panel));
  const int half = panels / 2;
  std::vector<double> cuts{0.0};
  for (int k = half - 1; k >= 1; --k) cuts.push_back(0.5 * std::pow(0.2, k));
  cuts.push_back(0.5);
  for (int k = 1; k <= half - 1; ++k) cuts.push_back(1.0 - 0.5 * std::pow(0.2, k));
  cuts.push_back(1.0);
  AxisRule r;
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double lo = cuts[p];
    const double width = cuts[p + 1] - lo;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double u = lo + width * gl.nodes[i];
      r.x.push_back(boost::math::ibeta_inv(a, b, u));
      r.w.push_back(width * gl.weights[i]);
    }
  }
  return r;
}

inline double ipow(double x, std::int64_t k) {
  double r = 1.0;
  while (k > 0) {
    if (k & 1) r *= x;
    x *= x;
    k >>= 1;
  }
  return r;
}

// Raw likelihood with coefficients, linear scale (the oracle is limited to small N).
struct Kernel {
  TrialData d;
  double coef;
  explicit Kernel(const TrialData& data)
      : d(data),
        coef(std::exp(boost::math::lgamma(static_cast<double>(data.N0) + 1.0) -
                      boost::math::lgamma(static_cast<double>(data.y0) + 1.0) -
                      boost::math::lgamma(static_cast<double>(data.N0 - data.y0) + 1.0) +
                      boost::math::lgamma(static_cast<double>(data.N1) + 1.0) -
                      boost::math::lgamma(static_cast<double>(data.y1) + 1.0) -
                      boost::math::lgamma(static_cast<double>(data.N1 - data.y1) + 1.0))) {}
  double arm0(double t0) const { return ipow(t0, d.y0) * ipow(1.0 - t0, d.N0 - d.y0); }
  double arm1(double t1) const { return ipow(t1, d.y1) * ipow(1.0 - t1, d.N1 - d.y1); }
};

inline double refine(const QuadratureSpec& spec, const std::string& what, auto&& estimate_at) {
  int nodes = 4;
  double prev = estimate_at(nodes);
  for (int r = 0; r < spec.max_refinements; ++r) {
    nodes *= 2;
    const double cur = estimate_at(nodes);
    if (std::abs(cur - prev) < spec.tolerance) return cur;
    prev = cur;
  }
  throw NumericError("oracle quadrature for " + what + " did not converge to " + std::to_string(spec.tolerance));
}

inline void guard_small(const TrialData& d) {
  require_valid(d);
  if (d.N() > 50) throw DomainError("oracle evidence is limited to N0 + N1 <= 50");
}

}  // namespace oracle_detail

/// Log evidence by tensor-product quadrature over the model's prior.
inline double oracle_log_ml(const TrialData& data, const BreasePrior& prior, OracleModel model,
                            const QuadratureSpec& spec = {}) {
  using namespace oracle_detail;
  guard_small(data);
  prior.validate();
  spec.validate();
  const Kernel K(data);
  const int P = spec.panels_per_axis;
  auto estimate = [&](int n) -> double {
    double total = 0.0;
    switch (model) {
      case OracleModel::M0: {
        const auto r0 = beta_axis(prior.mu0 * prior.n0, (1.0 - prior.mu0) * prior.n0, P, n);
        for (std::size_t i = 0; i < r0.x.size(); ++i) total += r0.w[i] * K.arm0(r0.x[i]) * K.arm1(r0.x[i]);
        break;
      }
      case OracleModel::M1: {
        const auto r0 = beta_axis(prior.mu0 * prior.n0, (1.0 - prior.mu0) * prior.n0, P, n);
        const auto re = beta_axis(prior.mue * prior.ne, (1.0 - prior.mue) * prior.ne, P, n);
        const auto rs = beta_axis(prior.mus * prior.ns, (1.0 - prior.mus) * prior.ns, P, n);
        for (std::size_t i = 0; i < r0.x.size(); ++i) {
          const double t0 = r0.x[i];
          double inner = 0.0;
          for (std::size_t j = 0; j < re.x.size(); ++j) {
            const double base = (1.0 - re.x[j]) * t0;
            double s = 0.0;
            for (std::size_t k = 0; k < rs.x.size(); ++k) s += rs.w[k] * K.arm1(base + rs.x[k] * (1.0 - t0));
            inner += re.w[j] * s;
          }
          total += r0.w[i] * K.arm0(t0) * inner;
        }
        break;
      }
      case OracleModel::no_harm:
      case OracleModel::no_benefit: {
        const bool harm = model == OracleModel::no_harm;
        const auto r0 = beta_axis(prior.mu0 * prior.n0, (1.0 - prior.mu0) * prior.n0, P, n);
        const auto re = harm ? beta_axis(prior.mue * prior.ne, (1.0 - prior.mue) * prior.ne, P, n)
                             : beta_axis(prior.mus * prior.ns, (1.0 - prior.mus) * prior.ns, P, n);
        for (std::size_t i = 0; i < r0.x.size(); ++i) {
          const double t0 = r0.x[i];
          double inner = 0.0;
          for (std::size_t j = 0; j < re.x.size(); ++j) {
            const double t1 = harm ? (1.0 - re.x[j]) * t0 : t0 + re.x[j] * (1.0 - t0);
            inner += re.w[j] * K.arm1(t1);
          }
          total += r0.w[i] * K.arm0(t0) * inner;
        }
        break;
      }
      case OracleModel::H0_aggregated: {
        // (p00, p10*, p11) ~ Dirichlet(c00, c10, c11) by stick breaking:
        // p11 ~ Beta(c11, c00 + c10), p10* / (1 - p11) ~ Beta(c10, c00).
        const double c00 = (1.0 - prior.mus) * prior.ns;
        const double c10 = prior.mue * prior.ne + prior.mus * prior.ns;
        const double c11 = (1.0 - prior.mue) * prior.ne;
        const auto r11 = beta_axis(c11, c00 + c10, P, n);
        const auto rr = beta_axis(c10, c00, P, n);
        for (std::size_t i = 0; i < r11.x.size(); ++i) {
          double inner = 0.0;
          for (std::size_t j = 0; j < rr.x.size(); ++j) {
            const double theta = r11.x[i] + 0.5 * rr.x[j] * (1.0 - r11.x[i]);
            inner += rr.w[j] * K.arm0(theta) * K.arm1(theta);
          }
          total += r11.w[i] * inner;
        }
        break;
      }
    }
    return std::log(K.coef * total);
  };
  return refine(spec, "BREASE evidence", estimate);
}

inline double oracle_log_ml_ib(const TrialData& data, double a, Hypothesis h, const QuadratureSpec& spec = {}) {
  using namespace oracle_detail;
  guard_small(data);
  spec.validate();
  if (!(a > 0.5)) throw DomainError("IB oracle needs a > 1/2");
  const Kernel K(data);
  auto estimate = [&](int n) {
    double total = 0.0;
    if (h == Hypothesis::H0) {
      const auto r = beta_axis(2.0 * a - 1.0, 2.0 * a - 1.0, spec.panels_per_axis, n);
      for (std::size_t i = 0; i < r.x.size(); ++i) total += r.w[i] * K.arm0(r.x[i]) * K.arm1(r.x[i]);
    } else {
      const auto r = beta_axis(a, a, spec.panels_per_axis, n);
      double s0 = 0.0, s1 = 0.0;
      for (std::size_t i = 0; i < r.x.size(); ++i) {
        s0 += r.w[i] * K.arm0(r.x[i]);
        s1 += r.w[i] * K.arm1(r.x[i]);
      }
      total = s0 * s1;
    }
    return std::log(K.coef * total);
  };
  return refine(spec, "IB evidence", estimate);
}

/// LT evidence by the trapezoid rule on [-10, 10]^2 (or [-10, 10] under H0),
/// halving the spacing until converged.
inline double oracle_log_ml_lt(const TrialData& data, const LtPrior& prior, Hypothesis h,
                               const QuadratureSpec& spec = {}) {
  using namespace oracle_detail;
  guard_small(data);
  spec.validate();
  prior.validate();
  const Kernel K(data);
  auto normal = [](double x, double mu, double s) {
    const double z = (x - mu) / s;
    return std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * M_PI));
  };
  auto sigmoid = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
  auto estimate = [&](int n) {
    const int m = 20 * n * spec.panels_per_axis / 4;
    const double hstep = 20.0 / m;
    double total = 0.0;
    for (int i = 0; i <= m; ++i) {
      const double b = -10.0 + i * hstep;
      const double wb = (i == 0 || i == m) ? 0.5 : 1.0;
      const double pb = normal(b, prior.mu_beta, prior.sigma_beta);
      if (h == Hypothesis::H0) {
        const double t = sigmoid(b);
        total += wb * pb * K.arm0(t) * K.arm1(t) * hstep;
        continue;
      }
      for (int j = 0; j <= m; ++j) {
        const double p = -10.0 + j * hstep;
        const double wp = (j == 0 || j == m) ? 0.5 : 1.0;
        total += wb * wp * pb * normal(p, prior.mu_psi, prior.sigma_psi) * K.arm0(sigmoid(b - 0.5 * p)) *
                 K.arm1(sigmoid(b + 0.5 * p)) * hstep * hstep;
      }
    }
    return std::log(K.coef * total);
  };
  return refine(spec, "LT evidence", estimate);
}

// ---------------------------------------------------------------------------
// Posterior marginals

enum class MarginalTarget { theta0, theta1 };

struct DensityTable {
  std::vector<double> x;
  std::vector<double> density;

  // Probability of [lo, hi] by the trapezoid rule on the table's own points.
  double mass(double lo, double hi) const {
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      const double a = std::max(lo, x[i]);
      const double b = std::min(hi, x[i + 1]);
      if (!(b > a)) continue;
      const double slope = (density[i + 1] - density[i]) / (x[i + 1] - x[i]);
      const double fa = density[i] + slope * (a - x[i]);
      const double fb = density[i] + slope * (b - x[i]);
      m += 0.5 * (fa + fb) * (b - a);
    }
    return m;
  }
};

namespace oracle_detail {

template <class F>
double gk(F&& f, double a, double b) {
  if (!(a < b)) return 0.0;
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12, 1e-9, &err);
}

// Tanh-sinh on each piece; copes with integrable endpoint singularities.
template <class F>
double ts_split(F&& f, std::vector<double> cuts, double a, double b, double tol = 1e-8) {
  if (!(a < b)) return 0.0;
  cuts.push_back(a);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = std::clamp(cuts[i], a, b);
    const double hi = std::clamp(cuts[i + 1], a, b);
    if (hi - lo > 1e-12 * std::max(std::abs(lo), std::abs(hi))) s += integrate_tanh_sinh(f, lo, hi, tol).value;
  }
  return s;
}

inline double log_arm(std::int64_t y, std::int64_t n, double t) {
  double v = 0.0;
  if (y > 0) v += static_cast<double>(y) * std::log(t);
  if (n - y > 0) v += static_cast<double>(n - y) * std::log1p(-t);
  return v;
}

inline double arm_mode(std::int64_t y, std::int64_t n) {
  return n == 0 ? 0.5 : static_cast<double>(y) / static_cast<double>(n);
}

// Binomial kernel rescaled to peak at 1.
struct ArmKernel {
  std::int64_t y, n;
  double shift, mode, width;

  ArmKernel(std::int64_t y_, std::int64_t n_) : y(y_), n(n_) {
    mode = arm_mode(y, n);
    shift = log_arm(y, n, std::clamp(mode, 1e-300, 1.0 - 1e-16));
    width = 4.0 * std::sqrt(std::max(mode * (1.0 - mode), 1e-4) / std::max<double>(static_cast<double>(n), 1.0));
  }
  double operator()(double t) const { return std::exp(log_arm(y, n, t) - shift); }
  std::vector<double> cuts() const { return {mode - width, mode, mode + width}; }
};

struct BetaDensity {
  double a, b, log_norm;
  BetaDensity(double a_, double b_) : a(a_), b(b_), log_norm(log_beta(a_, b_)) {}
  double operator()(double x) const { return (*this)(x, 1.0 - x); }
  // Density at x given the complement xc = 1 - x computed separately.
  double operator()(double x, double xc) const {
    if (!(x >= 0.0 && xc >= 0.0)) return 0.0;
    // Shape 1 contributes no factor, so the endpoint limit stays finite.
    const double la = a == 1.0 ? 0.0 : (a - 1.0) * std::log(x);
    const double lb = b == 1.0 ? 0.0 : (b - 1.0) * std::log(xc);
    return std::exp(la + lb - log_norm);
  }
};

}  // namespace oracle_detail

/// Marginal posterior density of theta0 or theta1 on a uniform grid of
/// `grid` points over [lo, hi], normalized over that range.
///
/// The side-effect prior is integrated in CDF coordinates v = F_s(eta_s),
/// which removes its endpoint singularity for small shapes.
inline DensityTable oracle_posterior_marginal(const TrialData& data, const BreasePrior& prior, MarginalTarget target,
                                              std::size_t grid, double lo = 0.0, double hi = 1.0) {
  using namespace oracle_detail;
  require_valid(data);
  prior.validate();
  if (data.N() > 2000) throw DomainError("oracle marginals are limited to N0 + N1 <= 2000");
  if (grid < 3) throw DomainError("oracle marginal needs at least 3 grid points");
  if (!(0.0 <= lo && lo < hi && hi <= 1.0)) throw DomainError("oracle marginal range must satisfy 0 <= lo < hi <= 1");
  const double a0 = prior.mu0 * prior.n0, b0 = (1.0 - prior.mu0) * prior.n0;
  const double ae = prior.mue * prior.ne, be = (1.0 - prior.mue) * prior.ne;
  const double as = prior.mus * prior.ns, bs = (1.0 - prior.mus) * prior.ns;
  const bool efficacy_uniform = ae == 1.0 && be == 1.0;
  const ArmKernel like0(data.y0, data.N0);
  const ArmKernel like1(data.y1, data.N1);
  const BetaDensity f0(a0, b0), fe(ae, be);
  auto eta_s = [&](double v) { return boost::math::ibeta_inv(as, bs, v); };

  // Treatment-arm likelihood averaged over both effect priors at fixed theta0.
  auto theta0_factor = [&](double t0) {
    auto over_v = [&](double v) {
      const double base = eta_s(v) * (1.0 - t0);
      const double top = std::min(1.0, base + t0);
      if (efficacy_uniform) {
        // theta1 is uniform on [base, base + t0]; the kernel integrates to a beta CDF.
        const double a = static_cast<double>(data.y1) + 1.0;
        const double b = static_cast<double>(data.N1 - data.y1) + 1.0;
        return (boost::math::ibeta(a, b, top) - boost::math::ibeta(a, b, base)) / t0;
      }
      auto over_e = [&](double, double e, double ec) { return like1(t0 * ec + base) * fe(e, ec); };
      // Likelihood peak mapped to eta_e = 1 - (theta1 - base) / t0.
      std::vector<double> cuts;
      for (double c : like1.cuts()) cuts.push_back(1.0 - (c - base) / t0);
      return integrate_two_sided(over_e, cuts, 0.0, 1.0);
    };
    return ts_split(over_v, {}, 0.0, 1.0, 1e-8);
  };

  // Control-arm posterior kernel integrated over the theta0 that can produce
  // theta1 = x when eta_s = es.
  auto theta1_factor = [&](double x) {
    auto over_v = [&](double v) {
      const double es = eta_s(v);
      double L = 0.0;
      if (es < 1.0) L = std::max(L, (x - es) / (1.0 - es));
      if (es > x) L = std::max(L, 1.0 - x / es);
      if (!(L < 1.0)) return 0.0;
      // In s = ln theta0 the 1 / theta0 Jacobian cancels. At the lower limit
      // eta_e hits 0 (es < x) or 1 (es > x); take that side from the offset.
      const double lo_s = std::log(std::max(L, 1e-300));
      auto over_s = [&](double s, double ds, double) {
        const double t0 = std::exp(s);
        double ee = 1.0 - (x - es * (1.0 - t0)) / t0, ec = 1.0 - ee;
        if (L > 0.0 && es < x) {
          ee = (1.0 - es) * L * std::expm1(ds) / t0;
          ec = 1.0 - ee;
        } else if (L > 0.0) {
          ec = es * L * std::expm1(ds) / t0;
          ee = 1.0 - ec;
        }
        return f0(t0) * like0(t0) * (efficacy_uniform ? 1.0 : fe(ee, ec));
      };
      std::vector<double> cuts;
      for (double c : like0.cuts())
        if (c > 0.0) cuts.push_back(std::log(c));
      return integrate_two_sided(over_s, cuts, lo_s, 0.0);
    };
    // Log singularity where eta_s crosses x and the lower limit reaches 0.
    return ts_split(over_v, {boost::math::ibeta(as, bs, x)}, 0.0, 1.0, 1e-7);
  };

  DensityTable t;
  t.x.resize(grid);
  t.density.resize(grid);
  for (std::size_t i = 0; i < grid; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid - 1);
    t.x[i] = x;
    // theta1 = 1 - x carries cancellation of order 1e-16 / (1 - x), so keep clear of the ends.
    const double inset = target == MarginalTarget::theta0 ? 1e-12 : 1e-6;
    const double xe = std::clamp(x, inset, 1.0 - inset);
    double v = target == MarginalTarget::theta0 ? f0(xe) * like0(xe) * theta0_factor(xe)
                                                : like1(xe) * theta1_factor(xe);
    t.density[i] = std::isfinite(v) ? v : 0.0;
  }
  const double z = t.mass(lo, hi);
  if (!(z > 0.0) || !std::isfinite(z)) throw NumericError("oracle marginal has no mass on the requested range");
  for (double& d : t.density) d /= z;
  return t;
}

}  // namespace brease

#endif  // BREASE_ORACLE_HPP
