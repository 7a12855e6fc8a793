#include "bpsim/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

namespace bpsim::io {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& os, const std::vector<std::string>& header) : os_(os), columns_(header.size()) {
  raw_row(header);
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(fmt(v));
  raw_row(cells);
}

void CsvWriter::raw_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw std::logic_error("csv row width differs from header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os_ << ',';
    os_ << cells[i];
  }
  os_ << '\n';
}

void write_trajectory_csv(std::ostream& os, const Trajectory& t) {
  CsvWriter w(os, {"epoch", "tau", "cx", "cy", "ax", "ay", "psi_c", "theta_c", "psi_a", "theta_a", "beta"});
  for (const auto& p : t.points) {
    const auto& s = p.state;
    const auto& r = p.ratio;
    w.raw_row({std::to_string(s.n), fmt(p.tau), std::to_string(s.cx), std::to_string(s.cy), std::to_string(s.ax),
               std::to_string(s.ay), fmt(r.psi_c), fmt(r.theta_c), fmt(r.psi_a), fmt(r.theta_a), fmt(r.beta)});
  }
}

void write_beta_trace_csv(std::ostream& os, const std::vector<double>& betas) {
  CsvWriter w(os, {"k", "beta"});
  for (std::size_t k = 0; k < betas.size(); ++k) w.raw_row({std::to_string(k + 1), fmt(betas[k])});
}

void write_learn_trace_csv(std::ostream& os, const std::vector<LearnTracePoint>& trace) {
  CsvWriter w(os, {"k", "w", "b", "beta"});
  for (const auto& p : trace) w.raw_row({std::to_string(p.k), fmt(p.w), fmt(p.b), fmt(p.beta)});
}

void write_epochs_csv(std::ostream& os, const std::vector<EpochRow>& rows) {
  CsvWriter w(os, {"n", "t", "a", "c"});
  for (const auto& r : rows) w.raw_row({std::to_string(r.n), fmt(r.t), fmt(r.a), fmt(r.c)});
}

void write_study_csv(std::ostream& os, const StudySummary& s) {
  CsvWriter w(os, {"sample", "feasible", "ai", "second_ne", "degradation", "alpha_R", "alpha_F", "mua", "a", "p"});
  for (std::size_t i = 0; i < s.samples.size(); ++i) {
    const auto& x = s.samples[i];
    w.raw_row({std::to_string(i), x.feasible ? "1" : "0", x.ai ? "1" : "0", x.second_ne ? "1" : "0",
               fmt(x.degradation), fmt(x.params.alpha_R), fmt(x.params.alpha_F), fmt(x.params.mua),
               fmt(x.params.a), fmt(x.params.p)});
  }
}

namespace {
Json number(double v) {
  // JSON has no infinity; encode non-finite values as null.
  return std::isfinite(v) ? Json(v) : Json(nullptr);
}
}  // namespace

Json to_json(const EquilibriumReport& r) {
  Json j;
  j["equilibria"] = Json::array();
  for (const auto& e : r.equilibria)
    j["equilibria"].push_back({{"beta", e.beta}, {"kind", eq_kind_name(e.kind)}, {"basin", {e.basin_lo, e.basin_hi}}});
  j["lifted"] = Json::array();
  for (const auto& l : r.lifted) {
    Json item;
    item["beta"] = l.beta ? Json(*l.beta) : Json(nullptr);
    item["h"] = {l.h[0], l.h[1], l.h[2], l.h[3]};
    item["kind"] = lift_kind_name(l.kind);
    j["lifted"].push_back(item);
  }
  return j;
}

Json to_json(const AttackAnalysis& a) {
  Json j;
  j["regime"] = a.in_E ? "two_limits" : "x_dominates";
  j["beta_r"] = a.beta_r ? Json(*a.beta_r) : Json(nullptr);
  Json rep = to_json(a.report);
  j["equilibria"] = rep["equilibria"];
  j["lifted"] = rep["lifted"];
  return j;
}

Json to_json(const MechanismDesign& d) {
  Json j;
  j["kind"] = wm_kind_name(d.kind);
  j["w"] = number(d.w);
  j["b"] = number(d.b);
  j["zeta"] = number(d.zeta);
  j["delta_target"] = number(d.delta_target);
  j["roots_F"] = d.roots_F;
  j["roots_R"] = d.roots_R;
  j["qos"] = number(d.qos);
  j["iqos"] = number(d.iqos);
  j["constraint_ok"] = d.constraint_ok;
  if (d.kind == WmKind::ea) {
    j["delta_a_threshold"] = number(d.delta_a_threshold);
    j["beta_na"] = number(d.beta_na);
  }
  return j;
}

Json to_json(const MarketMetrics& m) {
  return {{"c_star", number(m.c_star)}, {"n_e", number(m.n_e)}, {"max_reach", number(m.max_reach)},
          {"tau_s", number(m.tau_s)},   {"tau_e", number(m.tau_e)}};
}

Json to_json(const TefFit& f) {
  Json j;
  j["m_bar"] = number(f.params.m_bar);
  j["kappa1"] = number(f.params.kappa1);
  j["kappa2"] = number(f.params.kappa2);
  j["a_break"] = number(f.params.a_break);
  j["degenerate"] = f.degenerate;
  j["sse"] = number(f.sse);
  j["viral_runs"] = f.viral_runs;
  j["peak_current_mean"] = number(f.peak_current_mean);
  j["reach_mean"] = number(f.reach_mean);
  j["bins"] = Json::array();
  for (const auto& b : f.bins)
    j["bins"].push_back({{"lo", b.lo}, {"hi", b.hi}, {"transitions", b.transitions}, {"mean", number(b.mean())}});
  return j;
}

Json to_json(const AiDesign& d) {
  Json j;
  j["feasible"] = d.feasible;
  j["reason"] = d.reason;
  j["theta_tilde"] = number(d.theta_tilde);
  j["w"] = number(d.w);
  j["eta"] = number(d.eta);
  j["eta_bar"] = number(d.eta_bar);
  j["eta_star"] = number(d.eta_star);
  j["R"] = number(d.R);
  j["gamma"] = number(d.gamma);
  j["gamma_lower"] = number(d.gamma_lower);
  j["x_eta"] = number(d.x_eta);
  j["delta_a"] = number(d.delta_a);
  return j;
}

Json to_json(const NeReport& r) {
  Json j;
  j["equilibria"] = Json::array();
  for (const auto& e : r.equilibria)
    j["equilibria"].push_back(
        {{"x", e.x}, {"ai", e.ai}, {"beta_F", e.beta_F}, {"beta_R", e.beta_R}, {"success", e.success}});
  j["second_ne"] = r.second_ne;
  j["degradation"] = r.degradation ? Json(*r.degradation) : Json(nullptr);
  j["utility_gap"] = r.utility_gap;
  return j;
}

namespace {

Json parse_value(const ParamSpec& s, const std::string& text) {
  try {
    std::size_t used = 0;
    switch (s.type) {
      case ParamType::real: {
        double v = std::stod(text, &used);
        if (used != text.size()) break;
        return v;
      }
      case ParamType::integer: {
        long long v = std::stoll(text, &used);
        if (used != text.size()) break;
        return v;
      }
      case ParamType::boolean:
        if (text == "true" || text == "1") return true;
        if (text == "false" || text == "0") return false;
        break;
      case ParamType::text:
        return text;
    }
  } catch (const std::exception&) {
  }
  throw ConfigError("invalid value for " + s.key + ": " + text);
}

Json check_type(const ParamSpec& s, const Json& v) {
  switch (s.type) {
    case ParamType::real:
      if (v.is_number()) return v.get<double>();
      break;
    case ParamType::integer:
      if (v.is_number_integer()) return v.get<long long>();
      if (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>())
        return static_cast<long long>(v.get<double>());
      break;
    case ParamType::boolean:
      if (v.is_boolean()) return v;
      break;
    case ParamType::text:
      if (v.is_string()) return v;
      break;
  }
  throw ConfigError("wrong type for " + s.key);
}

}  // namespace

Json resolve_config(const std::vector<ParamSpec>& specs, const Json& file_values,
                    const std::map<std::string, std::string>& overrides) {
  std::set<std::string> known;
  for (const auto& s : specs) known.insert(s.key);
  if (!file_values.is_null() && !file_values.is_object()) throw ConfigError("config file must hold a JSON object");
  if (file_values.is_object())
    for (auto it = file_values.begin(); it != file_values.end(); ++it)
      if (!known.count(it.key())) throw ConfigError("unknown parameter: " + it.key());
  for (const auto& [k, v] : overrides)
    if (!known.count(k)) throw ConfigError("unknown parameter: " + k);
  Json out = Json::object();
  for (const auto& s : specs) {
    Json v;
    auto ov = overrides.find(s.key);
    if (ov != overrides.end()) {
      v = parse_value(s, ov->second);
    } else if (file_values.is_object() && file_values.contains(s.key)) {
      v = check_type(s, file_values.at(s.key));
    } else if (!s.default_value.is_null()) {
      v = check_type(s, s.default_value);
    } else {
      throw MissingParameter(s.key);
    }
    if (v.is_number()) {
      double x = v.get<double>();
      if ((s.min && x < *s.min) || (s.max && x > *s.max)) throw ConfigError("parameter out of range: " + s.key);
    }
    out[s.key] = v;
  }
  return out;
}

Json load_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  try {
    return Json::parse(f);
  } catch (const std::exception& e) {
    throw ConfigError("invalid JSON in " + path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << content;
  if (!f) throw std::runtime_error("write failed for " + path);
}

std::string sidecar_path(const std::string& artifact) { return artifact + ".config.json"; }

}  // namespace bpsim::io
