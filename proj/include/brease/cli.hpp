#ifndef BREASE_CLI_HPP
#define BREASE_CLI_HPP

// Command-line front end. Everything lives in this header so the test suite
// can drive `run` in-process; tools/brease_cli.cpp is a two-line main.

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "brease/brease.hpp"

namespace brease::cli {

namespace fs = std::filesystem;

enum Exit : int { kOk = 0, kFailure = 1, kArgument = 2, kValidation = 3, kNumeric = 4 };

inline constexpr const char* kOutDirEnv = "BREASE_OUT_DIR";
inline constexpr std::uint64_t kReplicateSeed = 20210707;

inline double parse_number(const std::string& text, const std::string& what) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v))
    throw DomainError(what + ": '" + text + "' is not a number");
  return v;
}

inline std::vector<double> parse_number_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = text.find(',', start);
    out.push_back(parse_number(text.substr(start, comma - start), what));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Prior shorthand

struct PriorSpec {
  enum class Kind { brease, eb, ib, lt };
  Kind kind = Kind::brease;
  BreasePrior prior = default_prior();
  double eb_n = 0.0;
  double ib_a = 1.0;
  LtPrior lt;
  std::string text = "default:0.3";

  BreasePrior resolve(const TrialData& d) const {
    if (kind == Kind::eb) return brease_eb_prior(d, eb_n);
    if (kind != Kind::brease) throw DomainError("prior '" + text + "' is not a BREASE prior");
    return prior;
  }
  bool is_brease() const { return kind == Kind::brease || kind == Kind::eb; }
};

/// default:<mu> | brease:<mu0>,<mue>,<mus>,<n0>,<ne>,<ns> | eb:<n> | ib:<a> |
/// lt:<sigma_psi> | inline JSON object | @file.json
inline PriorSpec parse_prior(const std::string& text) {
  PriorSpec s;
  s.text = text;
  if (!text.empty() && (text.front() == '{' || text.front() == '@')) {
    const std::string body = text.front() == '@' ? read_text_file(text.substr(1)) : text;
    json j;
    try {
      j = json::parse(body);
    } catch (const json::exception& e) {
      throw DomainError(std::string("prior JSON: ") + e.what());
    }
    s.prior = prior_from_json(j);
    return s;
  }
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw DomainError("prior '" + text + "' must look like family:values");
  const std::string family = text.substr(0, colon);
  const auto values = parse_number_list(text.substr(colon + 1), "prior " + family);
  auto want = [&](std::size_t n) {
    if (values.size() != n)
      throw DomainError("prior " + family + " takes " + std::to_string(n) + " value(s), got " +
                        std::to_string(values.size()));
  };
  if (family == "default") {
    want(1);
    s.prior = default_prior(values[0]);
  } else if (family == "brease") {
    want(6);
    s.prior = make_prior(values[0], values[1], values[2], values[3], values[4], values[5]);
  } else if (family == "eb") {
    want(1);
    if (!(values[0] > 0.0)) throw DomainError("eb prior size must be positive");
    s.kind = PriorSpec::Kind::eb;
    s.eb_n = values[0];
  } else if (family == "ib") {
    want(1);
    if (!(values[0] > 0.5)) throw DomainError("ib prior needs a > 1/2");
    s.kind = PriorSpec::Kind::ib;
    s.ib_a = values[0];
  } else if (family == "lt") {
    want(1);
    s.kind = PriorSpec::Kind::lt;
    s.lt.sigma_psi = values[0];
    s.lt.validate();
  } else {
    throw DomainError("unknown prior family '" + family + "'");
  }
  return s;
}

/// field:lo:hi:count (inclusive, evenly spaced) or field=v1,v2,...
inline GridAxis parse_axis(const std::string& text) {
  const auto eq = text.find('=');
  if (eq != std::string::npos)
    return {prior_field_from_string(text.substr(0, eq)), parse_number_list(text.substr(eq + 1), "axis " + text)};
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const auto c = text.find(':', start);
    parts.push_back(text.substr(start, c - start));
    if (c == std::string::npos) break;
    start = c + 1;
  }
  if (parts.size() != 4) throw DomainError("axis '" + text + "' must be field:lo:hi:count or field=v1,v2,...");
  const double lo = parse_number(parts[1], "axis low");
  const double hi = parse_number(parts[2], "axis high");
  const double n = parse_number(parts[3], "axis count");
  if (!(n >= 1.0) || n != std::floor(n)) throw DomainError("axis count must be a positive integer");
  GridAxis a{prior_field_from_string(parts[0]), {}};
  const auto count = static_cast<std::size_t>(n);
  for (std::size_t i = 0; i < count; ++i)
    a.values.push_back(count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
  return a;
}

inline Model parse_model(const std::string& s) {
  for (Model m : {Model::M0, Model::M1, Model::M_minus_mono, Model::M_plus_mono, Model::H0_aggregated})
    if (s == to_string(m)) return m;
  throw DomainError("model '" + s + "' is not one of M0, M1, M_minus_mono, M_plus_mono, H0_aggregated");
}

// ---------------------------------------------------------------------------
// Run configuration

struct RunConfig {
  std::string command;
  std::string input;
  std::string study;
  std::optional<std::int64_t> y0, n0, y1, n1;
  std::string prior = "default:0.3";
  std::optional<std::uint64_t> seed;
  std::int64_t draws = 100000;
  std::int64_t burn_in = 1000;
  int chains = 1;
  std::string sampler = "exact";
  std::string constraint = "none";
  std::vector<std::string> variants;
  double level = 0.95;
  std::string out_dir;
  bool quiet = false;
  // bf
  std::string comparator = "brease";
  std::optional<double> ib_a;
  std::optional<double> sigma_psi;
  // sensitivity
  std::string axis1 = "mue:0.01:0.99:50";
  std::string axis2 = "mus:0.01:0.99:50";
  std::string num = "M1";
  std::string den = "M0";
  // strata
  std::string mode = "independent";
  double lambda = 0.5, nu = 10.0, hyper_shape = 10.0, hyper_rate = 0.1;
  double concentration = 1.0;
  // replicate
  std::string replicate_study;
  int grid = 50;
  // oracle
  std::string target = "theta0";
  std::size_t points = 201;
  double lo = 0.0, hi = 1.0;
};

inline std::string output_dir(const RunConfig& c) {
  std::string d = c.out_dir;
  if (d.empty())
    if (const char* env = std::getenv(kOutDirEnv)) d = env;
  if (d.empty()) d = ".";
  std::error_code ec;
  fs::create_directories(d, ec);
  if (ec) throw Error("cannot create output directory '" + d + "': " + ec.message());
  return d;
}

inline std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

inline std::uint64_t require_seed(const RunConfig& c) {
  if (!c.seed) throw DomainError(c.command + " draws random samples and needs --seed");
  return *c.seed;
}

inline Constraint parse_constraint(const std::string& s) {
  for (Constraint c : {Constraint::none, Constraint::no_harm, Constraint::no_benefit})
    if (s == to_string(c)) return c;
  throw DomainError("constraint must be none, no_harm or no_benefit");
}

/// Counts from --y0/--n0/--y1/--n1 or one row of --input.
inline std::pair<std::string, TrialData> load_one(const RunConfig& c) {
  const bool inline_counts = c.y0 || c.n0 || c.y1 || c.n1;
  if (inline_counts && !c.input.empty()) throw DomainError("give either --input or inline counts, not both");
  if (inline_counts) {
    if (!(c.y0 && c.n0 && c.y1 && c.n1)) throw DomainError("inline counts need all of --y0 --n0 --y1 --n1");
    TrialData d{*c.y0, *c.n0, *c.y1, *c.n1};
    require_valid(d);
    return {"inline", d};
  }
  if (c.input.empty()) throw DomainError("no data: pass --input FILE or --y0 --n0 --y1 --n1");
  const auto corpus = parse_trials(read_text_file(c.input));
  if (corpus.studies.empty()) throw ValidationError(c.input + ": no data rows");
  if (c.study.empty()) {
    if (corpus.studies.size() > 1) throw DomainError(c.input + " has several studies; pick one with --study");
    return {corpus.studies.front().id, corpus.studies.front().data};
  }
  for (const auto& s : corpus.studies)
    if (s.id == c.study) return {s.id, s.data};
  throw DomainError("study '" + c.study + "' not found in " + c.input);
}

inline std::vector<Study> load_all(const RunConfig& c) {
  if (c.input.empty() || !c.study.empty()) {
    auto [id, d] = load_one(c);
    return {Study{id, d}};
  }
  auto corpus = parse_trials(read_text_file(c.input));
  if (corpus.studies.empty()) throw ValidationError(c.input + ": no data rows");
  return corpus.studies;
}

// ---------------------------------------------------------------------------
// Sampling helpers

/// Runs `chains` chains on derived seeds, one thread each, and concatenates
/// their draws in chain order. A single chain uses the seed unchanged.
template <class Fn>
DrawSet run_chains(int chains, std::uint64_t seed, std::int64_t total, Fn&& fn) {
  if (chains < 1) throw DomainError("--chains must be at least 1");
  if (chains == 1) return fn(seed, total);
  const RngStream root(seed);
  std::vector<DrawSet> parts(static_cast<std::size_t>(chains));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(chains));
  std::vector<std::thread> workers;
  for (int k = 0; k < chains; ++k) {
    const std::int64_t n = total / chains + (k < total % chains ? 1 : 0);
    workers.emplace_back([&, k, n] {
      try {
        parts[static_cast<std::size_t>(k)] = fn(root.derive(static_cast<std::uint64_t>(k)).seed(), n);
      } catch (...) {
        errors[static_cast<std::size_t>(k)] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  DrawSet out;
  out.meta = parts.front().meta;
  out.meta.seed = seed;
  for (auto& p : parts) out.draws.insert(out.draws.end(), p.draws.begin(), p.draws.end());
  return out;
}

inline json summaries_json(const DrawSet& d, double level) {
  json arr = json::array();
  for (Estimand e : kAllEstimands) arr.push_back(summary_to_json(summarize(d, e, level)));
  return arr;
}

inline json risk_summaries_json(const std::vector<RiskDraw>& d, double level) {
  json arr = json::array();
  for (Estimand e : kAllEstimands)
    if (e != Estimand::eta_e && e != Estimand::eta_s) arr.push_back(summary_to_json(summarize(d, e, level)));
  return arr;
}

inline std::string risk_draws_csv(const std::vector<RiskDraw>& d) {
  std::string out = "theta0,theta1\n";
  for (const auto& r : d) out += fmt_double(r.theta0) + ',' + fmt_double(r.theta1) + '\n';
  return out;
}

inline std::vector<RiskDraw> to_risks(const LtDraws& d) {
  std::vector<RiskDraw> r;
  r.reserve(d.draws.size());
  for (const auto& x : d.draws) r.push_back({x.theta0, x.theta1});
  return r;
}

// Evidence for the BREASE model family; every entry carries its BF against M0.
inline json brease_evidence_json(const TrialData& d, const BreasePrior& p, const std::vector<std::string>& variants,
                                 std::optional<std::uint64_t> seed) {
  const auto m0 = log_ml_m0(d, p);
  json arr = json::array();
  arr.push_back(evidence_to_json(m0));
  auto add = [&](const LogEvidence& e) { arr.push_back(evidence_to_json(e, &m0)); };
  add(log_ml_m1(d, p));
  for (const auto& v : variants) {
    if (v == "mono") {
      add(log_ml_monotone(d, p, Constraint::no_harm));
      add(log_ml_monotone(d, p, Constraint::no_benefit));
    } else if (v == "h0") {
      add(log_ml_h0_aggregated(d, aggregated_from(p)));
    } else if (v == "directional") {
      if (!seed) throw DomainError("the directional variant samples and needs --seed");
      add(log_ml_directional(d, p, Direction::benefit, 100000, 100000, *seed));
      add(log_ml_directional(d, p, Direction::harm, 100000, 100000, RngStream(*seed).derive(1).seed()));
    } else if (v == "sym") {
      add(log_ml_symmetrized_minus(d, p, p));
      add(log_ml_symmetrized_plus(d, p, p));
    } else {
      throw DomainError("unknown evidence variant '" + v + "' (mono, h0, directional, sym)");
    }
  }
  return arr;
}

inline void emit(const RunConfig& c, std::ostream& out, const json& report) {
  if (!c.quiet) out << report.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Commands

inline int cmd_analyze(const RunConfig& c, std::ostream& out) {
  const auto [id, data] = load_one(c);
  const auto spec = parse_prior(c.prior);
  const std::uint64_t seed = require_seed(c);
  if (c.draws < 100) throw DomainError("--draws must be at least 100");
  const std::string dir = output_dir(c);
  json report{{"command", "analyze"}, {"study", id}, {"data", data_to_json(data)}, {"prior_spec", spec.text}};

  if (spec.kind == PriorSpec::Kind::ib) {
    const IbPrior ib{spec.ib_a, spec.ib_a, spec.ib_a, spec.ib_a};
    const auto draws = ib_posterior_sample(data, ib, c.draws, seed);
    const auto h0 = ib_log_ml(data, spec.ib_a, Hypothesis::H0);
    report["sampler"] = "independent_beta";
    report["seed"] = seed;
    report["summaries"] = risk_summaries_json(draws, c.level);
    report["evidence"] = json::array({evidence_to_json(h0), evidence_to_json(ib_log_ml(data, ib), &h0)});
    write_text_file(join(dir, "draws.csv"), risk_draws_csv(draws));
  } else if (spec.kind == PriorSpec::Kind::lt) {
    const auto draws = lt_posterior_sample(data, spec.lt, c.draws + c.burn_in, c.burn_in, seed);
    const auto h0 = lt_log_ml(data, spec.lt, Hypothesis::H0);
    report["sampler"] = "independence_metropolis";
    report["seed"] = seed;
    report["acceptance_rate"] = draws.acceptance_rate;
    report["summaries"] = risk_summaries_json(to_risks(draws), c.level);
    report["evidence"] =
        json::array({evidence_to_json(h0), evidence_to_json(lt_log_ml(data, spec.lt, Hypothesis::H1), &h0)});
    write_text_file(join(dir, "draws.csv"), risk_draws_csv(to_risks(draws)));
  } else {
    const BreasePrior prior = spec.resolve(data);
    const Constraint constraint = parse_constraint(c.constraint);
    if (c.sampler != "exact" && c.sampler != "gibbs") throw DomainError("--sampler must be exact or gibbs");
    const bool exact = c.sampler == "exact";
    const DrawSet draws = run_chains(c.chains, seed, c.draws, [&](std::uint64_t s, std::int64_t n) {
      return exact ? exact_sample(data, prior, n, s, constraint)
                   : gibbs_sample(data, prior, n + c.burn_in, c.burn_in, BreaseParams{}, s, constraint);
    });
    report["prior"] = prior_to_json(prior);
    report["constraint"] = to_string(constraint);
    report["sampler"] = c.sampler;
    report["seed"] = seed;
    report["chains"] = c.chains;
    report["summaries"] = summaries_json(draws, c.level);
    report["evidence"] = brease_evidence_json(data, prior, c.variants, seed);
    write_text_file(join(dir, "draws.csv"), draws_to_csv(draws));
    auto side = draws_sidecar(draws);
    side["chains"] = c.chains;
    write_text_file(join(dir, "draws.json"), side.dump(2) + '\n');
  }
  write_text_file(join(dir, "report.json"), report.dump(2) + '\n');
  emit(c, out, report);
  return kOk;
}

inline json bf_entry(const RunConfig& c, const std::string& comparator, const TrialData& d,
                     const PriorSpec& spec) {
  json e{{"comparator", comparator}};
  if (comparator == "brease") {
    const auto p = spec.is_brease() ? spec.resolve(d) : default_prior();
    e["prior"] = prior_to_json(p);
    e["evidence"] = brease_evidence_json(d, p, c.variants, c.seed);
    const auto bf = bayes_factor(log_ml_m1(d, p), log_ml_m0(d, p));
    e["bf10"] = bf.bf;
    e["bf01"] = 1.0 / bf.bf;
  } else if (comparator == "ib") {
    const double a = c.ib_a.value_or(spec.kind == PriorSpec::Kind::ib ? spec.ib_a : 1.0);
    const auto h0 = ib_log_ml(d, a, Hypothesis::H0);
    const auto h1 = ib_log_ml(d, a, Hypothesis::H1);
    e["a"] = a;
    e["evidence"] = json::array({evidence_to_json(h0), evidence_to_json(h1, &h0)});
    e["bf10"] = std::exp(h1.log_ml - h0.log_ml);
    e["bf01"] = std::exp(h0.log_ml - h1.log_ml);
  } else if (comparator == "lt") {
    LtPrior lt = spec.kind == PriorSpec::Kind::lt ? spec.lt : LtPrior{};
    if (c.sigma_psi) lt.sigma_psi = *c.sigma_psi;
    lt.validate();
    const auto h0 = lt_log_ml(d, lt, Hypothesis::H0);
    const auto h1 = lt_log_ml(d, lt, Hypothesis::H1);
    e["sigma_psi"] = lt.sigma_psi;
    e["evidence"] = json::array({evidence_to_json(h0), evidence_to_json(h1, &h0)});
    e["bf10"] = std::exp(h1.log_ml - h0.log_ml);
    e["bf01"] = std::exp(h0.log_ml - h1.log_ml);
  } else {
    throw DomainError("--comparator must be brease, ib, lt or all");
  }
  return e;
}

inline int cmd_bf(const RunConfig& c, std::ostream& out) {
  const auto spec = parse_prior(c.prior);
  std::string comparator = c.comparator;
  if (spec.kind == PriorSpec::Kind::ib && comparator == "brease") comparator = "ib";
  if (spec.kind == PriorSpec::Kind::lt && comparator == "brease") comparator = "lt";
  const std::vector<std::string> which =
      comparator == "all" ? std::vector<std::string>{"brease", "ib", "lt"} : std::vector<std::string>{comparator};
  json studies = json::array();
  for (const auto& s : load_all(c)) {
    json row{{"study", s.id}, {"data", data_to_json(s.data)}, {"results", json::array()}};
    for (const auto& w : which) row["results"].push_back(bf_entry(c, w, s.data, spec));
    studies.push_back(std::move(row));
  }
  json report{{"command", "bf"}, {"prior_spec", spec.text}, {"studies", studies}};
  write_text_file(join(output_dir(c), "bf.json"), report.dump(2) + '\n');
  emit(c, out, report);
  return kOk;
}

inline int cmd_sensitivity(const RunConfig& c, std::ostream& out) {
  const auto [id, data] = load_one(c);
  const auto spec = parse_prior(c.prior);
  const auto grid = sensitivity_grid(data, spec.resolve(data), parse_axis(c.axis1), parse_axis(c.axis2),
                                     parse_model(c.num), parse_model(c.den));
  const std::string dir = output_dir(c);
  write_text_file(join(dir, "grid.csv"), grid_to_csv(grid));
  double lo = grid.points.front().bf, hi = lo;
  for (const auto& p : grid.points) {
    lo = std::min(lo, p.bf);
    hi = std::max(hi, p.bf);
  }
  json report{{"command", "sensitivity"}, {"study", id},         {"num", c.num},
              {"den", c.den},             {"cells", grid.points.size()}, {"bf_min", lo},
              {"bf_max", hi},             {"grid_csv", join(dir, "grid.csv")}};
  emit(c, out, report);
  return kOk;
}

inline json strata_json(const StratifiedDraws& sd, const StratifiedTrialData& data, double level,
                        double concentration, std::uint64_t seed) {
  json rows = json::array();
  for (std::size_t i = 0; i < sd.strata.size(); ++i)
    rows.push_back({{"stratum", sd.labels[i]},
                    {"data", data_to_json(data.strata[i].data)},
                    {"summaries", summaries_json(sd.strata[i], level)}});
  std::vector<std::int64_t> counts;
  for (const auto& st : data.strata) counts.push_back(st.data.N());
  const auto pop = population_effects(sd, counts, concentration, RngStream(seed).derive(1000).seed());
  std::vector<RiskDraw> pr;
  pr.reserve(pop.size());
  for (const auto& p : pop) pr.push_back({p.theta0, p.theta1});
  return {{"strata", rows}, {"population", risk_summaries_json(pr, level)}};
}

inline int cmd_strata(const RunConfig& c, std::ostream& out) {
  if (c.input.empty()) throw DomainError("strata needs --input with a stratum,y0,N0,y1,N1 file");
  const auto data = parse_strata(read_text_file(c.input));
  require_valid(data);
  const std::uint64_t seed = require_seed(c);
  const std::string dir = output_dir(c);
  json report{{"command", "strata"}, {"mode", c.mode}, {"seed", seed}};
  StratifiedDraws sd;
  if (c.mode == "independent") {
    const auto spec = parse_prior(c.prior);
    std::vector<BreasePrior> priors;
    for (const auto& st : data.strata) priors.push_back(spec.resolve(st.data));
    sd = stratified_independent(data, priors, c.draws, seed);
    report["prior_spec"] = spec.text;
  } else if (c.mode == "hierarchical") {
    HierarchicalHyperPrior h;
    h.lambda.fill(c.lambda);
    h.nu.fill(c.nu);
    h.shape.fill(c.hyper_shape);
    h.rate.fill(c.hyper_rate);
    sd = hierarchical_sample(data, h, c.draws + c.burn_in, c.burn_in, seed);
    report["hyperprior"] = {{"lambda", c.lambda}, {"nu", c.nu}, {"shape", c.hyper_shape}, {"rate", c.hyper_rate}};
    json acc;
    static constexpr const char* kNames[6] = {"mu0", "mue", "mus", "n0", "ne", "ns"};
    for (std::size_t j = 0; j < 6; ++j) acc[kNames[j]] = sd.diagnostics.acceptance[j];
    report["acceptance"] = acc;
    report["warnings"] = sd.diagnostics.warnings;
    write_text_file(join(dir, "hyper_chain.csv"), hyper_chain_to_csv(sd));
  } else {
    throw DomainError("--mode must be independent or hierarchical");
  }
  const auto body = strata_json(sd, data, c.level, c.concentration, seed);
  report["strata"] = body["strata"];
  report["population"] = body["population"];
  write_text_file(join(dir, "strata.json"), report.dump(2) + '\n');
  emit(c, out, report);
  return kOk;
}

inline int cmd_oracle(const RunConfig& c, std::ostream& out) {
  const auto [id, data] = load_one(c);
  const auto spec = parse_prior(c.prior);
  MarginalTarget target;
  if (c.target == "theta0") target = MarginalTarget::theta0;
  else if (c.target == "theta1") target = MarginalTarget::theta1;
  else throw DomainError("--target must be theta0 or theta1");
  const auto table = oracle_posterior_marginal(data, spec.resolve(data), target, c.points, c.lo, c.hi);
  std::string csv = "x,density\n";
  for (std::size_t i = 0; i < table.x.size(); ++i) csv += fmt_double(table.x[i]) + ',' + fmt_double(table.density[i]) + '\n';
  const std::string dir = output_dir(c);
  write_text_file(join(dir, "marginal_" + c.target + ".csv"), csv);
  emit(c, out, json{{"command", "oracle"}, {"study", id}, {"target", c.target}, {"points", c.points}});
  return kOk;
}

// ---------------------------------------------------------------------------
// Bundled replications

inline constexpr TrialData kAspirinPhs{26, 11034, 10, 11037};
inline constexpr TrialData kCovidPfizer{169, 20172, 9, 19965};
inline constexpr TrialData kPathological{20, 1000, 40, 1000};

inline StratifiedTrialData covid_age_strata() {
  return {{{"16-55", {114, 9955, 5, 9897}},
           {"56-64", {29, 3663, 2, 3652}},
           {"65-74", {14, 3095, 1, 3074}},
           {"75+", {5, 785, 0, 774}}}};
}

inline BreasePrior pathological_prior() { return make_prior(0.5, 0.5, 0.01, 2.0, 2.0, 1.0); }

inline json bf_triplet(const TrialData& d) {
  const auto p = default_prior();
  return {{"brease_bf10", bayes_factor(log_ml_m1(d, p), log_ml_m0(d, p)).bf},
          {"ib_bf10", ib_bf10(d, 1.0)},
          {"ib_bf01", 1.0 / ib_bf10(d, 1.0)},
          {"lt_bf10", lt_bf10(d, LtPrior{})}};
}

inline json single_summary(const std::vector<RiskDraw>& d, Estimand e, double level) {
  return summary_to_json(summarize(d, e, level));
}

inline void maybe_grid(const RunConfig& c, const TrialData& d, const std::string& dir, json& report) {
  if (c.grid <= 0) return;
  // mu values 0.01, 0.02, ... so both sensitivity anchors (0.01 and 0.5) lie on the grid.
  GridAxis e{PriorField::mue, {}}, s{PriorField::mus, {}};
  for (int i = 1; i <= c.grid; ++i) {
    const double v = 0.5 * static_cast<double>(i) / static_cast<double>(c.grid);
    e.values.push_back(v);
    s.values.push_back(v);
  }
  const auto g = sensitivity_grid(d, default_prior(), e, s);
  write_text_file(join(dir, "grid.csv"), grid_to_csv(g));
  double lo = g.points.front().bf;
  for (const auto& p : g.points) lo = std::min(lo, p.bf);
  report["grid"] = {{"cells", g.points.size()}, {"bf10_min", lo}};
}

inline int cmd_replicate(const RunConfig& c, std::ostream& out) {
  const std::uint64_t seed = c.seed.value_or(kReplicateSeed);
  const RngStream root(seed);
  const std::string dir = join(output_dir(c), "replicate_" + c.replicate_study);
  fs::create_directories(dir);
  json report{{"command", "replicate"}, {"study", c.replicate_study}, {"seed", seed}, {"draws", c.draws}};

  if (c.replicate_study == "aspirin_phs" || c.replicate_study == "covid_pfizer") {
    const bool aspirin = c.replicate_study == "aspirin_phs";
    const TrialData d = aspirin ? kAspirinPhs : kCovidPfizer;
    const Estimand e = aspirin ? Estimand::risk_ratio : Estimand::vaccine_efficacy;
    report["data"] = data_to_json(d);
    const auto draws = exact_sample(d, default_prior(), c.draws, root.derive(0).seed());
    write_text_file(join(dir, "draws.csv"), draws_to_csv(draws));
    report["brease"] = summaries_json(draws, c.level);
    report["bayes_factors"] = bf_triplet(d);
    report["ib"] = single_summary(ib_posterior_sample(d, IbPrior{}, c.draws, root.derive(1).seed()), e, c.level);
    const auto lt = lt_posterior_sample(d, LtPrior{}, c.draws + c.burn_in, c.burn_in, root.derive(2).seed());
    report["lt"] = single_summary(to_risks(lt), e, c.level);
    report["lt_acceptance_rate"] = lt.acceptance_rate;
    if (aspirin) {
      const auto lo = make_prior(0.5, 0.5, 0.01, 2.0, 1.0, 1.0);
      const auto hi = make_prior(0.5, 0.5, 0.5, 2.0, 1.0, 1.0);
      report["sensitivity_anchors"] = {
          {"bf10_mus_0.01", bayes_factor(log_ml_m1(d, lo), log_ml_m0(d, lo)).bf},
          {"bf01_mus_0.5", bayes_factor(log_ml_m0(d, hi), log_ml_m1(d, hi)).bf}};
    } else {
      const auto strata = covid_age_strata();
      const std::vector<BreasePrior> priors(strata.strata.size(), default_prior());
      const auto ind = stratified_independent(strata, priors, c.draws, root.derive(3).seed());
      const auto hier =
          hierarchical_sample(strata, HierarchicalHyperPrior{}, c.draws + 10000, 10000, root.derive(4).seed());
      json rows = json::array();
      for (std::size_t i = 0; i < strata.strata.size(); ++i)
        rows.push_back({{"stratum", strata.strata[i].label},
                        {"independent", summary_to_json(summarize(ind.strata[i], e, c.level))},
                        {"hierarchical", summary_to_json(summarize(hier.strata[i], e, c.level))}});
      report["age_strata"] = rows;
      report["hierarchical_warnings"] = hier.diagnostics.warnings;
    }
    maybe_grid(c, d, dir, report);
  } else if (c.replicate_study == "pathological") {
    const TrialData d = kPathological;
    const auto prior = pathological_prior();
    report["data"] = data_to_json(d);
    report["prior"] = prior_to_json(prior);
    constexpr double lo = 0.0, hi = 0.1;
    constexpr std::size_t bins = 100;
    const auto m0 = oracle_posterior_marginal(d, prior, MarginalTarget::theta0, 201, lo, hi);
    const auto m1 = oracle_posterior_marginal(d, prior, MarginalTarget::theta1, 201, lo, hi);
    const auto exact = exact_sample(d, prior, c.draws, root.derive(0).seed());
    // Ten Gibbs sweeps per kept draw so the histogram noise matches the exact sampler's.
    const auto gibbs = gibbs_sample(d, prior, 10 * c.draws + c.burn_in, c.burn_in, BreaseParams{}, root.derive(1).seed());
    auto col0 = [](const DrawSet& s, std::size_t stride) {
      std::vector<double> v;
      for (std::size_t i = 0; i < s.size(); i += stride) v.push_back(s.draws[i].theta0);
      return v;
    };
    auto col1 = [](const DrawSet& s, std::size_t stride) {
      std::vector<double> v;
      for (std::size_t i = 0; i < s.size(); i += stride) v.push_back(s.draws[i].theta1());
      return v;
    };
    auto mass0 = [&](double a, double b) { return m0.mass(a, b); };
    auto mass1 = [&](double a, double b) { return m1.mass(a, b); };
    report["tv"] = {{"exact_theta0", histogram_tv(col0(exact, 1), lo, hi, bins, mass0)},
                    {"gibbs_theta0", histogram_tv(col0(gibbs, 1), lo, hi, bins, mass0)},
                    {"exact_theta1", histogram_tv(col1(exact, 1), lo, hi, bins, mass1)},
                    {"gibbs_theta1", histogram_tv(col1(gibbs, 1), lo, hi, bins, mass1)}};
    report["ks_exact_vs_gibbs_theta0"] = ks_two_sample(col0(exact, 1), col0(gibbs, 10));
    std::string csv = "x,theta0_density,theta1_density\n";
    for (std::size_t i = 0; i < m0.x.size(); ++i)
      csv += fmt_double(m0.x[i]) + ',' + fmt_double(m0.density[i]) + ',' + fmt_double(m1.density[i]) + '\n';
    write_text_file(join(dir, "oracle_marginals.csv"), csv);
    write_text_file(join(dir, "draws_exact.csv"), draws_to_csv(exact));
  } else {
    throw DomainError("unknown replication '" + c.replicate_study + "' (aspirin_phs, covid_pfizer, pathological)");
  }
  write_text_file(join(dir, "report.json"), report.dump(2) + '\n');
  emit(c, out, report);
  return kOk;
}

// ---------------------------------------------------------------------------
// Entry point

inline void add_data_options(CLI::App* s, RunConfig& c) {
  s->add_option("--input,-i", c.input, "CSV with header study,y0,N0,y1,N1");
  s->add_option("--study", c.study, "Row of --input to use");
  s->add_option("--y0", c.y0, "Control-arm events");
  s->add_option("--n0", c.n0, "Control-arm size");
  s->add_option("--y1", c.y1, "Treatment-arm events");
  s->add_option("--n1", c.n1, "Treatment-arm size");
}

inline void add_common_options(CLI::App* s, RunConfig& c) {
  s->add_option("--prior,-p", c.prior, "default:MU | brease:MU0,MUE,MUS,N0,NE,NS | eb:N | ib:A | lt:SIGMA | JSON | @FILE");
  s->add_option("--out-dir,-o", c.out_dir, std::string("Output directory (default $") + kOutDirEnv + " or .)");
  s->add_flag("--quiet,-q", c.quiet, "Do not print the report");
}

inline void add_sampling_options(CLI::App* s, RunConfig& c) {
  s->add_option("--seed", c.seed, "RNG seed (required)");
  s->add_option("--draws,-n", c.draws, "Posterior draws kept");
  s->add_option("--burn-in", c.burn_in, "Discarded iterations for MCMC samplers");
  s->add_option("--level", c.level, "Credible level")->check(CLI::Range(0.5, 0.999));
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Bayesian analysis of binary randomized experiments"};
  app.name("brease");
  app.require_subcommand(1);
  RunConfig c;

  auto* analyze = app.add_subcommand("analyze", "Posterior summaries, draws and evidence");
  add_data_options(analyze, c);
  add_common_options(analyze, c);
  add_sampling_options(analyze, c);
  analyze->add_option("--sampler", c.sampler, "exact or gibbs")->check(CLI::IsMember({"exact", "gibbs"}));
  analyze->add_option("--constraint", c.constraint, "none, no_harm or no_benefit");
  analyze->add_option("--chains", c.chains, "Parallel chains on derived seeds");
  analyze->add_option("--variants", c.variants, "Extra evidence: mono h0 directional sym");

  auto* bf = app.add_subcommand("bf", "Evidence and Bayes factors for every study");
  add_data_options(bf, c);
  add_common_options(bf, c);
  bf->add_option("--comparator", c.comparator, "brease, ib, lt or all")
      ->check(CLI::IsMember({"brease", "ib", "lt", "all"}));
  bf->add_option("--a", c.ib_a, "IB prior parameter");
  bf->add_option("--sigma-psi", c.sigma_psi, "LT prior scale of the log odds ratio");
  bf->add_option("--variants", c.variants, "Extra evidence: mono h0 directional sym");
  bf->add_option("--seed", c.seed, "Seed for the directional variant");

  auto* sens = app.add_subcommand("sensitivity", "Bayes-factor grid over two prior fields");
  add_data_options(sens, c);
  add_common_options(sens, c);
  sens->add_option("--axis1", c.axis1, "field:lo:hi:count or field=v1,v2,...");
  sens->add_option("--axis2", c.axis2, "field:lo:hi:count or field=v1,v2,...");
  sens->add_option("--num", c.num, "Numerator model");
  sens->add_option("--den", c.den, "Denominator model");

  auto* strata = app.add_subcommand("strata", "Stratified analysis, independent or hierarchical");
  strata->add_option("--input,-i", c.input, "CSV with header stratum,y0,N0,y1,N1")->required();
  add_common_options(strata, c);
  add_sampling_options(strata, c);
  strata->add_option("--mode", c.mode, "independent or hierarchical")
      ->check(CLI::IsMember({"independent", "hierarchical"}));
  strata->add_option("--lambda", c.lambda, "Hyperprior mean of each component mean");
  strata->add_option("--nu", c.nu, "Hyperprior size of each component mean");
  strata->add_option("--hyper-shape", c.hyper_shape, "Gamma shape of each component size");
  strata->add_option("--hyper-rate", c.hyper_rate, "Gamma rate of each component size");
  strata->add_option("--concentration", c.concentration, "Dirichlet concentration for stratum weights");

  auto* rep = app.add_subcommand("replicate", "Bundled case studies");
  rep->add_option("study", c.replicate_study, "aspirin_phs, covid_pfizer or pathological")->required();
  rep->add_option("--out-dir,-o", c.out_dir, "Output directory");
  rep->add_option("--seed", c.seed, "RNG seed (default fixed and recorded in the report)");
  rep->add_option("--draws,-n", c.draws, "Posterior draws");
  rep->add_option("--burn-in", c.burn_in, "Discarded MCMC iterations");
  rep->add_option("--grid", c.grid, "Sensitivity grid size per axis, 0 to skip");
  rep->add_flag("--quiet,-q", c.quiet, "Do not print the report");

  auto* orc = app.add_subcommand("oracle", "Quadrature posterior marginal of theta0 or theta1");
  add_data_options(orc, c);
  add_common_options(orc, c);
  orc->add_option("--target", c.target, "theta0 or theta1");
  orc->add_option("--points", c.points, "Grid points")->check(CLI::Range(3, 100000));
  orc->add_option("--lo", c.lo, "Grid start");
  orc->add_option("--hi", c.hi, "Grid end");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kArgument;
  }

  c.command = app.get_subcommands().front()->get_name();
  try {
    if (c.command == "analyze") return cmd_analyze(c, out);
    if (c.command == "bf") return cmd_bf(c, out);
    if (c.command == "sensitivity") return cmd_sensitivity(c, out);
    if (c.command == "strata") return cmd_strata(c, out);
    if (c.command == "replicate") return cmd_replicate(c, out);
    return cmd_oracle(c, out);
  } catch (const ValidationError& e) {
    err << "brease " << c.command << ": data error: " << e.what() << '\n';
    return kValidation;
  } catch (const DomainError& e) {
    err << "brease " << c.command << ": argument error: " << e.what() << '\n';
    return kArgument;
  } catch (const NumericError& e) {
    err << "brease " << c.command << ": numeric error: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::exception& e) {
    err << "brease " << c.command << ": " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace brease::cli

#endif  // BREASE_CLI_HPP
