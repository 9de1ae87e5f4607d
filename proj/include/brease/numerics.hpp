#ifndef BREASE_NUMERICS_HPP
#define BREASE_NUMERICS_HPP

// Special functions, log-space reductions, random variates and 1-D quadrature
// shared by every other header.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "brease/errors.hpp"

namespace brease {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// A non-negative quantity stored as its natural logarithm; -inf encodes zero.
struct LogReal {
  double value = kNegInf;

  static LogReal from_linear(double x) {
    if (x < 0.0 || std::isnan(x)) throw DomainError("LogReal: negative or NaN value");
    return LogReal{std::log(x)};
  }
  double linear() const { return std::exp(value); }
  bool is_zero() const { return value == kNegInf; }

  friend LogReal operator*(LogReal a, LogReal b) {
    if (a.is_zero() || b.is_zero()) return LogReal{};
    return LogReal{a.value + b.value};
  }
  friend LogReal operator/(LogReal a, LogReal b) {
    if (b.is_zero()) throw DomainError("LogReal: division by zero");
    if (a.is_zero()) return LogReal{};
    return LogReal{a.value - b.value};
  }
  friend LogReal operator+(LogReal a, LogReal b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const double hi = std::max(a.value, b.value);
    const double lo = std::min(a.value, b.value);
    return LogReal{hi + std::log1p(std::exp(lo - hi))};
  }
};

// ---------------------------------------------------------------------------
// Special functions

namespace detail {
inline void require_positive(double a, const char* what) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError(std::string(what) + " must be positive and finite");
}
}  // namespace detail

inline double log_gamma(double a) {
  detail::require_positive(a, "log_gamma argument");
  return boost::math::lgamma(a);
}

/// ln B(a, b). Relative accuracy ~1e-13 across [1e-3, 1e6]: when one argument
/// dwarfs the other the Gamma ratio is taken directly instead of differencing
/// two large lgamma values.
inline double log_beta(double a, double b) {
  detail::require_positive(a, "log_beta first argument");
  detail::require_positive(b, "log_beta second argument");
  const double small = std::min(a, b);
  const double large = std::max(a, b);
  if (large > 10.0 * small && large > 20.0) {
    // ln Gamma(large) - ln Gamma(large + small), in steps small enough that each ratio stays normal.
    const double step = std::max(1e-300, 300.0 / std::log(large + small));
    double acc = 0.0, done = 0.0;
    while (done < small) {
      const double delta = std::min(step, small - done);
      acc += std::log(boost::math::tgamma_delta_ratio(large + done, delta));
      done += delta;
    }
    return boost::math::lgamma(small) + acc;
  }
  return boost::math::lgamma(a) + boost::math::lgamma(b) - boost::math::lgamma(a + b);
}

// ln B(a, b, c) = lnΓ(a) + lnΓ(b) + lnΓ(c) − lnΓ(a+b+c).
inline double log_beta3(double a, double b, double c) {
  return log_beta(a, b) + log_beta(a + b, c);
}

// ln C(n, k) for integer-valued n >= k >= 0.
inline double log_choose(std::int64_t n, std::int64_t k) {
  if (n < 0 || k < 0 || k > n) throw DomainError("log_choose: need 0 <= k <= n");
  if (k == 0 || k == n) return 0.0;
  return -std::log(static_cast<double>(n) + 1.0) -
         log_beta(static_cast<double>(n - k) + 1.0, static_cast<double>(k) + 1.0);
}

/// ln Σ exp(terms[i]) with max-shift; returns -inf when every term is -inf.
inline double log_sum_exp(std::span<const double> terms) {
  if (terms.empty()) throw DomainError("log_sum_exp: empty sequence");
  const double hi = *std::max_element(terms.begin(), terms.end());
  if (terms.size() == 1) return hi;
  if (hi == kNegInf) return kNegInf;
  if (std::isinf(hi)) return hi;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - hi);
  return hi + std::log(acc);
}

inline double log_sum_exp(std::initializer_list<double> terms) {
  return log_sum_exp(std::span<const double>(terms.begin(), terms.size()));
}

// Beta CDF I_x(a, b).
inline double reg_inc_beta(double x, double a, double b) {
  detail::require_positive(a, "reg_inc_beta shape a");
  detail::require_positive(b, "reg_inc_beta shape b");
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("reg_inc_beta: x outside [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  return boost::math::ibeta(a, b, x);
}

// Quantile of Beta(a, b).
inline double inv_reg_inc_beta(double p, double a, double b) {
  detail::require_positive(a, "inv_reg_inc_beta shape a");
  detail::require_positive(b, "inv_reg_inc_beta shape b");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("inv_reg_inc_beta: p outside [0,1]");
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  return boost::math::ibeta_inv(a, b, p);
}

inline double beta_log_pdf(double x, double a, double b) {
  if (x < 0.0 || x > 1.0) return kNegInf;
  if (x == 0.0) return a < 1.0 ? std::numeric_limits<double>::infinity() : (a == 1.0 ? -log_beta(a, b) : kNegInf);
  if (x == 1.0) return b < 1.0 ? std::numeric_limits<double>::infinity() : (b == 1.0 ? -log_beta(a, b) : kNegInf);
  return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta(a, b);
}

inline double beta_pdf(double x, double a, double b) { return std::exp(beta_log_pdf(x, a, b)); }

// Beta density at x with xc = 1 - x supplied by the caller, accurate near either end.
inline double beta_pdf_split(double x, double xc, double a, double b) {
  if (!(x >= 0.0 && xc >= 0.0)) return 0.0;
  const double la = a == 1.0 ? 0.0 : (a - 1.0) * std::log(x);
  const double lb = b == 1.0 ? 0.0 : (b - 1.0) * std::log(xc);
  return std::exp(la + lb - log_beta(a, b));
}

// Binomial log pmf without the coefficient: y ln p + (n−y) ln(1−p), with 0·ln 0 = 0.
inline double binomial_log_kernel(std::int64_t y, std::int64_t n, double p) {
  const double fy = static_cast<double>(y);
  const double fn = static_cast<double>(n - y);
  double out = 0.0;
  if (y > 0) out += p > 0.0 ? fy * std::log(p) : kNegInf;
  if (n - y > 0) out += p < 1.0 ? fn * std::log1p(-p) : kNegInf;
  return out;
}

// ---------------------------------------------------------------------------
// Random streams

/// Seeded 64-bit generator. Identical seeds give identical sequences; derive()
/// produces statistically independent child streams for parallel chains.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed = 0) : seed_(seed), engine_(expand(seed)) {}

  std::uint64_t seed() const noexcept { return seed_; }

  RngStream derive(std::uint64_t index) const {
    std::uint64_t s = seed_ ^ (0x9E3779B97F4A7C15ULL * (index + 1));
    return RngStream(splitmix(s));
  }

  result_type operator()() { return engine_(); }
  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }

  // Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double t = 2.0 * M_PI * uniform();
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

 private:
  static std::uint64_t splitmix(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  static std::seed_seq expand_seq(std::uint64_t seed, std::array<std::uint32_t, 8>& words) {
    std::uint64_t s = seed;
    for (std::size_t i = 0; i < words.size(); i += 2) {
      const std::uint64_t v = splitmix(s);
      words[i] = static_cast<std::uint32_t>(v);
      words[i + 1] = static_cast<std::uint32_t>(v >> 32);
    }
    return std::seed_seq(words.begin(), words.end());
  }
  static std::mt19937_64 expand(std::uint64_t seed) {
    std::array<std::uint32_t, 8> words{};
    std::seed_seq seq = expand_seq(seed, words);
    return std::mt19937_64(seq);
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// ---------------------------------------------------------------------------
// Random variates

/// ln G for G ~ Gamma(shape, 1). Working on the log scale keeps shapes far
/// below one usable: G(a) = G(a+1)·U^(1/a) underflows long before its log does.
inline double sample_log_gamma(double shape, RngStream& rng) {
  detail::require_positive(shape, "gamma shape");
  double boost_log = 0.0;
  if (shape < 1.0) {
    boost_log = std::log(rng.uniform()) / shape;
    shape += 1.0;
  }
  // Marsaglia & Tsang squeeze.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return std::log(d * v) + boost_log;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return std::log(d * v) + boost_log;
  }
}

inline double sample_gamma(double shape, double rate, RngStream& rng) {
  detail::require_positive(rate, "gamma rate");
  return std::exp(sample_log_gamma(shape, rng)) / rate;
}

/// Beta(a, b) draw in the open interval (0, 1). Results that would round to
/// an endpoint are clamped to the nearest representable interior value.
inline double sample_beta(double a, double b, RngStream& rng) {
  detail::require_positive(a, "beta shape a");
  detail::require_positive(b, "beta shape b");
  const double la = sample_log_gamma(a, rng);
  const double lb = sample_log_gamma(b, rng);
  // x = Ga / (Ga + Gb) = 1 / (1 + exp(lb − la))
  const double diff = lb - la;
  double x = diff > 0.0 ? std::exp(-diff) / (1.0 + std::exp(-diff)) : 1.0 / (1.0 + std::exp(diff));
  constexpr double lo = std::numeric_limits<double>::min();
  constexpr double hi = 1.0 - 0x1.0p-53;
  return std::clamp(x, lo, hi);
}

inline std::int64_t sample_binomial(std::int64_t n, double p, RngStream& rng) {
  if (n < 0) throw DomainError("binomial: negative trial count");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("binomial: probability outside [0,1]");
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  std::binomial_distribution<std::int64_t> dist(n, p);
  return dist(rng);
}

inline std::vector<double> sample_dirichlet(std::span<const double> alphas, RngStream& rng) {
  if (alphas.empty()) throw DomainError("dirichlet: empty concentration vector");
  std::vector<double> logs(alphas.size());
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    detail::require_positive(alphas[i], "dirichlet concentration");
    logs[i] = sample_log_gamma(alphas[i], rng);
  }
  const double total = log_sum_exp(logs);
  std::vector<double> out(alphas.size());
  for (std::size_t i = 0; i < alphas.size(); ++i) out[i] = std::exp(logs[i] - total);
  return out;
}

// ---------------------------------------------------------------------------
// Quadrature

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t levels = 0;
};

/// Tanh-sinh quadrature on [a, b]; copes with algebraic endpoint singularities
/// (beta densities with shape < 1). Interior kinks must be split by the caller.
template <class F>
QuadratureResult integrate_tanh_sinh(F&& f, double a, double b, double tolerance = 1e-10) {
  if (!(a < b)) return {};
  static thread_local boost::math::quadrature::tanh_sinh<double> integrator(15);
  QuadratureResult r;
  double l1 = 0.0;
  // Map to [0, 1]: Boost mishandles left abscissas when |a| >= 0.5 and its
  // error estimate degrades on very short intervals.
  const double w = b - a;
  r.value = w * integrator.integrate(
                    [&](double u) {
                      const double v = f(a + w * u);
                      return std::isfinite(v) ? v : 0.0;
                    },
                    0.0, 1.0, tolerance, &r.error_estimate, &l1, &r.levels);
  r.error_estimate *= w;
  if (!std::isfinite(r.value)) throw NumericError("tanh-sinh quadrature produced a non-finite value");
  return r;
}

/// Tanh-sinh over [a, b] split at `cuts`, for integrands singular at a or b.
/// f(x, x - a, b - x) gets both endpoint distances free of cancellation.
template <class F>
double integrate_two_sided(F&& f, std::vector<double> cuts, double a, double b, double tolerance = 1e-8) {
  if (!(a < b)) return 0.0;
  cuts.push_back(a);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double p = std::clamp(cuts[i], a, b);
    const double q = std::clamp(cuts[i + 1], a, b);
    const double w = q - p;
    if (!(w > 1e-12 * std::max(std::abs(p), std::abs(q)))) continue;
    const double left = p - a, right = b - q;
    auto from_p = [&](double t) { return f(p + t, left + t, right + (w - t)); };
    auto from_q = [&](double t) { return f(q - t, left + (w - t), right + t); };
    s += integrate_tanh_sinh(from_p, 0.0, 0.5 * w, tolerance).value +
         integrate_tanh_sinh(from_q, 0.0, 0.5 * w, tolerance).value;
  }
  return s;
}

/// Gauss-Legendre rule with `n` nodes on [0, 1] (Newton iteration on P_n).
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(std::size_t n) : nodes(n), weights(n) {
    for (std::size_t i = 0; i < n; ++i) {
      double x = std::cos(M_PI * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0;
        double p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
          const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
          p0 = p1;
          p1 = pk;
        }
        dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes[i] = 0.5 * (1.0 - x);
      weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

}  // namespace brease

#endif  // BREASE_NUMERICS_HPP
