#ifndef BREASE_IO_HPP
#define BREASE_IO_HPP

// JSON and CSV exchange formats for priors, draws, evidence and grids.

#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "brease/comparators.hpp"
#include "brease/covariates.hpp"
#include "brease/evidence.hpp"
#include "brease/samplers.hpp"
#include "brease/summaries.hpp"

namespace brease {

using json = nlohmann::ordered_json;

// %.17g round-trips every double.
inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline json prior_to_json(const BreasePrior& p) {
  return json{{"mu0", p.mu0}, {"mue", p.mue}, {"mus", p.mus}, {"n0", p.n0}, {"ne", p.ne}, {"ns", p.ns}};
}

inline BreasePrior prior_from_json(const json& j) {
  try {
    return make_prior(j.at("mu0").get<double>(), j.at("mue").get<double>(), j.at("mus").get<double>(),
                      j.at("n0").get<double>(), j.at("ne").get<double>(), j.at("ns").get<double>());
  } catch (const json::exception& e) {
    throw DomainError(std::string("prior JSON: ") + e.what());
  }
}

inline json data_to_json(const TrialData& d) {
  return json{{"y0", d.y0}, {"N0", d.N0}, {"y1", d.y1}, {"N1", d.N1}};
}

inline json evidence_to_json(const LogEvidence& e, const LogEvidence* versus = nullptr) {
  json j{{"model", to_string(e.model)}, {"log_ml", e.log_ml}};
  if (versus) {
    const auto bf = bayes_factor(e, *versus);
    j["bf_vs"] = json{{"model", to_string(versus->model)}, {"bf", bf.bf}, {"log_bf", bf.log_bf}};
  } else {
    j["bf_vs"] = nullptr;
  }
  j["mc_error"] = e.mc_error;
  j["data_fingerprint"] = hex64(e.data_fingerprint);
  return j;
}

inline json summary_to_json(const EstimandSummary& s) {
  return json{{"estimand", to_string(s.estimand)}, {"median", s.median}, {"cri_low", s.cri_low},
              {"cri_high", s.cri_high}, {"level", s.level}, {"n_draws", s.n_draws}};
}

inline std::string draws_to_csv(const DrawSet& d) {
  std::string out = "theta0,eta_e,eta_s,theta1\n";
  out.reserve(out.size() + d.size() * 80);
  for (const auto& p : d.draws) {
    out += fmt_double(p.theta0) + ',' + fmt_double(p.eta_e) + ',' + fmt_double(p.eta_s) + ',' + fmt_double(p.theta1()) +
           '\n';
  }
  return out;
}

inline json draws_sidecar(const DrawSet& d) {
  return json{{"seed", d.meta.seed},
              {"method", to_string(d.meta.method)},
              {"burn_in", d.meta.burn_in},
              {"constraint", to_string(d.meta.constraint)},
              {"prior", prior_to_json(d.meta.prior)},
              {"n_draws", d.size()}};
}

inline std::string grid_to_csv(const SensitivityGrid& g) {
  std::string out = "param1,value1,param2,value2,log_bf,bf,band\n";
  for (const auto& p : g.points) {
    out += std::string(to_string(g.field1)) + ',' + fmt_double(p.value1) + ',' + to_string(g.field2) + ',' +
           fmt_double(p.value2) + ',' + fmt_double(p.log_bf) + ',' + fmt_double(p.bf) + ',' + p.band + '\n';
  }
  return out;
}

inline std::string hyper_chain_to_csv(const StratifiedDraws& s) {
  std::string out = "iteration,mu0,mue,mus,n0,ne,ns\n";
  for (std::size_t i = 0; i < s.hyper.size(); ++i) {
    const auto& h = s.hyper[i];
    out += std::to_string(i);
    for (double v : h.mu) out += ',' + fmt_double(v);
    for (double v : h.n) out += ',' + fmt_double(v);
    out += '\n';
  }
  return out;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace brease

#endif  // BREASE_IO_HPP
