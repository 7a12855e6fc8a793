// Command-line front end: one subcommand per experiment, parameters from a
// JSON file and/or flags, artifacts to --out (or stdout) with a sidecar
// holding the fully resolved configuration.

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "bpsim/attack.hpp"
#include "bpsim/game.hpp"
#include "bpsim/graph.hpp"
#include "bpsim/io.hpp"
#include "bpsim/market.hpp"
#include "bpsim/ode.hpp"
#include "bpsim/population.hpp"
#include "bpsim/warning.hpp"

using namespace bpsim;
using io::Json;
using io::ParamSpec;
using io::ParamType;

namespace {

struct Output {
  std::string path;  // empty means stdout
  std::ostringstream body;
};

struct Command {
  std::string group, name, help;
  std::vector<ParamSpec> specs;
  bool randomized = false;
  std::function<void(const Json&, Output&, int jobs)> run;
};

ParamSpec real(std::string k, double def, std::string help, std::optional<double> lo = std::nullopt,
               std::optional<double> hi = std::nullopt) {
  return {std::move(k), ParamType::real, Json(def), std::move(help), lo, hi};
}
ParamSpec real_req(std::string k, std::string help, std::optional<double> lo = std::nullopt) {
  return {std::move(k), ParamType::real, Json(nullptr), std::move(help), lo, std::nullopt};
}
ParamSpec integer(std::string k, long long def, std::string help, std::optional<double> lo = std::nullopt) {
  return {std::move(k), ParamType::integer, Json(def), std::move(help), lo, std::nullopt};
}
ParamSpec flag(std::string k, bool def, std::string help) {
  return {std::move(k), ParamType::boolean, Json(def), std::move(help), std::nullopt, std::nullopt};
}
ParamSpec text(std::string k, std::string def, std::string help) {
  return {std::move(k), ParamType::text, Json(def), std::move(help), std::nullopt, std::nullopt};
}
ParamSpec text_req(std::string k, std::string help) {
  return {std::move(k), ParamType::text, Json(nullptr), std::move(help), std::nullopt, std::nullopt};
}

std::uint64_t seed_of(const Json& c) { return static_cast<std::uint64_t>(c.at("seed").get<long long>()); }

// Runs replications over a small thread pool; results land in index order.
template <class T>
std::vector<T> parallel_reps(long long reps, int jobs, const std::function<T(long long)>& f) {
  std::vector<T> out(static_cast<std::size_t>(reps));
  int n = std::max(1, std::min<int>(jobs, static_cast<int>(std::max<long long>(reps, 1))));
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    pool.emplace_back([&, j] {
      try {
        for (long long r = j; r < reps; r += n) out[static_cast<std::size_t>(r)] = f(r);
      } catch (...) {
        errs[static_cast<std::size_t>(j)] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

// ---- bp ----

std::vector<ParamSpec> bp_specs() {
  return {text("model", "example_one", "offspring model: example_one | galton_watson"),
          real("mean", 1.5, "Poisson mean for the galton_watson model", 0.0),
          integer("cx0", 1, "initial x count", 0),
          integer("cy0", 0, "initial y count", 0),
          integer("max_events", 10000, "event cap", 1),
          integer("record_every", 1, "record every k-th epoch", 1),
          integer("replications", 1, "independent runs", 1)};
}

OffspringSampler bp_sampler(const Json& c) {
  std::string model = c.at("model").get<std::string>();
  if (model == "example_one") return example_one_sampler();
  if (model == "galton_watson") {
    double mean = c.at("mean").get<double>();
    return [mean](const PopulationState&, PopType parent, int, Rng& rng) {
      OffspringSample o;
      o.parent = parent;
      o.own = poisson(rng, mean);
      return o;
    };
  }
  throw io::ConfigError("unknown model: " + model);
}

std::vector<Trajectory> bp_runs(const Json& c, int jobs) {
  OffspringSampler sampler = bp_sampler(c);
  SimOptions opt;
  opt.max_events = c.at("max_events").get<long long>();
  opt.record_every = c.at("record_every").get<long long>();
  PopulationState init = PopulationState::initial(c.at("cx0").get<long long>(), c.at("cy0").get<long long>());
  std::uint64_t seed = seed_of(c);
  return parallel_reps<Trajectory>(c.at("replications").get<long long>(), jobs, [&](long long r) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(r));
    return simulate(sampler, DeathModel::unit(), init, opt, rng);
  });
}

void bp_simulate(const Json& c, Output& out, int jobs) {
  auto runs = bp_runs(c, jobs);
  io::write_trajectory_csv(out.body, runs.front());
  if (runs.size() > 1) {
    DichotomyStats d = dichotomy(runs);
    Json j = {{"replications", d.replications}, {"extinct", d.extinct},      {"growing", d.growing},
              {"unclassified", d.unclassified}, {"extinct_fraction", d.extinct_fraction},
              {"mean_rate", d.mean_rate},       {"rate_se", d.rate_se}};
    std::cerr << j.dump() << '\n';
  }
}

void bp_ratios(const Json& c, Output& out, int jobs) {
  Json one = c;
  one["record_every"] = 1;
  one["replications"] = 1;
  Trajectory t = bp_runs(one, jobs).front();
  io::CsvWriter w(out.body, {"epoch", "psi_c", "theta_c", "psi_a", "theta_a", "beta"});
  RatioVector r = t.points.front().ratio;
  for (std::size_t i = 0; i < t.points.size(); ++i) {
    if (i > 0) r = ratios_recursive(r, t.points[i - 1].state, t.points[i].state);
    w.raw_row({std::to_string(t.points[i].state.n), io::fmt(r.psi_c), io::fmt(r.theta_c), io::fmt(r.psi_a),
               io::fmt(r.theta_a), io::fmt(r.beta)});
  }
}

// ---- attack ----

std::vector<ParamSpec> attack_specs(bool sim) {
  std::vector<ParamSpec> s = {real_req("e_xx", "mean own offspring of x", 0.0),
                              real_req("e_xy", "mean y captured by x", 0.0),
                              real_req("e_yy", "mean own offspring of y", 0.0),
                              real_req("e_yx", "mean x captured by y", 0.0)};
  if (sim) {
    for (auto& p : std::vector<ParamSpec>{integer("cx0", 10, "initial x", 0), integer("cy0", 10, "initial y", 0),
                                          integer("max_events", 100000, "event cap", 1),
                                          integer("record_every", 100, "record every k-th epoch", 1),
                                          integer("own_floor", 2, "deterministic part of own offspring", 0),
                                          real("transient_c", 0.0, "transient mean offset scale"),
                                          real("transient_alpha", 1.0, "transient decay exponent", 0.0)})
      s.push_back(p);
  }
  return s;
}

AttackLimits attack_limits(const Json& c) {
  return {c.at("e_xx").get<double>(), c.at("e_xy").get<double>(), c.at("e_yy").get<double>(),
          c.at("e_yx").get<double>()};
}

void attack_analyze(const Json& c, Output& out, int) {
  out.body << io::to_json(classify_regime_and_limits(attack_limits(c))).dump(2) << '\n';
}

void attack_simulate(const Json& c, Output& out, int) {
  AttackSamplerConfig sc;
  sc.limits = attack_limits(c);
  sc.limits.validate();
  sc.own_floor = c.at("own_floor").get<long long>();
  sc.transient_c = c.at("transient_c").get<double>();
  sc.transient_alpha = c.at("transient_alpha").get<double>();
  SimOptions opt;
  opt.max_events = c.at("max_events").get<long long>();
  opt.record_every = c.at("record_every").get<long long>();
  Rng rng = make_rng(seed_of(c));
  Trajectory t = simulate(make_attack_sampler(sc), DeathModel::unit(),
                          PopulationState::initial(c.at("cx0").get<long long>(), c.at("cy0").get<long long>()), opt,
                          rng);
  io::write_trajectory_csv(out.body, t);
}

// ---- wm ----

std::vector<ParamSpec> wm_specs() {
  return {text("preset", "naive", "parameter set: naive | smart"),
          real("mua", 0.1, "adversarial user share", 0.0, 0.99),
          real("delta", 0.05, "real-post threshold", 0.0, 1.0),
          flag("iqos", true, "constrain the threshold that ignores adversarial tags")};
}

WmModel wm_model(const Json& c) {
  std::string p = c.at("preset").get<std::string>();
  if (p == "naive") return naive_model();
  if (p == "smart") return smart_model();
  throw io::ConfigError("unknown preset: " + p);
}

UserMix wm_mix(const Json& c) {
  double mua = c.at("mua").get<double>();
  return c.at("preset").get<std::string>() == "smart" ? smart_mix(mua) : naive_mix(mua);
}

void wm_design(const Json& c, Output& out, int) {
  WmKind kind = parse_wm_kind(c.at("kind").get<std::string>());
  MechanismDesign d = design_by_kind(kind, wm_model(c), wm_mix(c), c.at("delta").get<double>(), c.at("iqos").get<bool>());
  out.body << io::to_json(d).dump(2) << '\n';
}

void wm_learn(const Json& c, Output& out, int) {
  LearnConfig cfg;
  cfg.budget = c.at("budget").get<long long>();
  cfg.trace_every = c.at("trace_every").get<long long>();
  cfg.iqos = c.at("iqos").get<bool>();
  LearnResult r = learn_wm(cfg, wm_model(c), wm_mix(c), c.at("delta").get<double>(), seed_of(c));
  io::write_learn_trace_csv(out.body, r.trace);
  std::cerr << Json{{"w", r.w}, {"b", r.b}, {"epochs", r.epochs}, {"extinct", r.extinct}, {"iqos", r.learned_iqos}}.dump()
            << '\n';
}

void wm_simulate(const Json& c, Output& out, int) {
  WmModel m = wm_model(c);
  UserMix mix = wm_mix(c);
  MechanismDesign d = design_by_kind(parse_wm_kind(c.at("kind").get<std::string>()), m, mix,
                                     c.at("delta").get<double>(), c.at("iqos").get<bool>());
  std::string act = c.at("actuality").get<std::string>();
  if (act != "F" && act != "R") throw io::ConfigError("actuality must be F or R");
  TaggingConfig tc;
  tc.init_x = c.at("init_x").get<long long>();
  tc.init_y = c.at("init_y").get<long long>();
  tc.max_events = c.at("max_events").get<long long>();
  tc.record_every = c.at("record_every").get<long long>();
  Rng rng = make_rng(seed_of(c));
  Trajectory t = simulate_tagging(act == "F" ? Actuality::F : Actuality::R, d, m, mix, tc, rng);
  io::CsvWriter w(out.body, {"k", "beta"});
  for (const auto& p : t.points) w.raw_row({std::to_string(p.state.n), io::fmt(p.state.beta())});
}

// ---- market ----

std::vector<ParamSpec> tef_specs() {
  return {real("m_bar", 21.321042, "expected forwards of a fresh post", 0.0),
          real("kappa1", 532e-6, "slope before the break", 0.0),
          real("kappa2", 83e-6, "slope after the break", 0.0),
          real("a_break", 35000, "total shares at the slope change", 0.0),
          real("rho", 0.6, "attractiveness", 0.0, 1.0)};
}

TefParams tef_params(const Json& c) {
  TefParams p;
  p.m_bar = c.at("m_bar").get<double>();
  p.kappa1 = c.at("kappa1").get<double>();
  p.kappa2 = c.at("kappa2").get<double>();
  p.a_break = c.at("a_break").get<double>();
  p.rho = c.at("rho").get<double>();
  p.validate();
  return p;
}

ClosedForm market_cf(const Json& c) { return closed_form(tef_params(c), c.at("a0").get<double>(), c.at("c0").get<double>()); }

void market_metrics(const Json& c, Output& out, int) {
  out.body << io::to_json(metrics(market_cf(c))).dump(2) << '\n';
}

void market_closed_form(const Json& c, Output& out, int) {
  ClosedForm cf = market_cf(c);
  long long n_max = c.at("n_max").get<long long>();
  if (n_max <= 0) n_max = static_cast<long long>(std::ceil(cf.n_e));
  io::write_epochs_csv(out.body, closed_form_epochs(cf, n_max, c.at("exact_times").get<bool>()));
}

void market_simulate(const Json& c, Output& out, int) {
  MarketSimConfig cfg;
  cfg.a0 = c.at("a0").get<long long>();
  cfg.max_events = c.at("max_events").get<long long>();
  cfg.record_every = c.at("record_every").get<long long>();
  cfg.cap = c.at("cap").get<long long>();
  std::string law = c.at("law").get<std::string>();
  if (law == "poisson") cfg.law = OffspringLaw::poisson;
  else if (law == "binomial") cfg.law = OffspringLaw::binomial;
  else throw io::ConfigError("law must be poisson or binomial");
  Rng rng = make_rng(seed_of(c));
  io::write_trajectory_csv(out.body, simulate_stpbp(tef_params(c), cfg, rng));
}

void market_fit(const Json& c, Output& out, int jobs) {
  Graph g = parse_graph_file(c.at("graph").get<std::string>());
  TefEstimateConfig cfg;
  cfg.rho = c.at("rho").get<double>();
  cfg.bin_width = c.at("bin_width").get<double>();
  cfg.runs = c.at("runs").get<long long>();
  cfg.viral_threshold = c.at("viral_threshold").get<long long>();
  cfg.seed = seed_of(c);
  cfg.jobs = jobs;
  Json j = io::to_json(estimate_tef(g, cfg));
  j["nodes"] = g.nodes();
  j["mean_degree"] = g.mean_degree();
  j["common_fit_valid"] = cfg.rho >= 0.4;
  out.body << j.dump(2) << '\n';
}

void market_propagate(const Json& c, Output& out, int) {
  Graph g = parse_graph_file(c.at("graph").get<std::string>());
  std::vector<long long> seeds;
  std::stringstream ss(c.at("seeds").get<std::string>());
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) seeds.push_back(std::stoll(item));
  Rng rng = make_rng(seed_of(c));
  PropagationResult r = propagate_on_graph(g, seeds, c.at("rho").get<double>(), rng);
  io::CsvWriter w(out.body, {"epoch", "reader", "forwards", "total", "current"});
  for (const auto& e : r.events)
    w.raw_row({std::to_string(e.epoch), std::to_string(e.reader), std::to_string(e.forwards), std::to_string(e.total),
               std::to_string(e.current)});
}

// ---- game ----

std::vector<ParamSpec> game_specs() {
  return {real("alpha_R", 0.27, "innate fake-tag probability, real post", 0.0, 1.0),
          real("alpha_F", 0.30, "innate fake-tag probability, fake post", 0.0, 1.0),
          real("mua", 0.1, "adversary share", 0.0, 0.99),
          real("p", 0.3, "prior probability of a fake post", 0.0, 1.0),
          real("Q_p", 1.0, "utility of participating"),
          real("Q_np", 0.0, "utility of abstaining"),
          real("C_e", 1.0, "cost of processing a warning", 0.0),
          real("a", 2.5, "response exponent on the innate probability", 0.0),
          real("b", 1.0, "response exponent on the warning", 0.0),
          real("c", 1.0, "response scale", 0.0),
          real("theta", 0.75, "fake-post target", 0.0, 1.0),
          real("delta", 0.28, "real-post threshold", 0.0, 1.0)};
}

GameParams game_params(const Json& c) {
  GameParams gp;
  gp.alpha_R = c.at("alpha_R").get<double>();
  gp.alpha_F = c.at("alpha_F").get<double>();
  gp.mua = c.at("mua").get<double>();
  gp.p = c.at("p").get<double>();
  gp.Q_p = c.at("Q_p").get<double>();
  gp.Q_np = c.at("Q_np").get<double>();
  gp.C_e = c.at("C_e").get<double>();
  gp.a = c.at("a").get<double>();
  gp.b = c.at("b").get<double>();
  gp.c = c.at("c").get<double>();
  gp.theta = c.at("theta").get<double>();
  gp.delta = c.at("delta").get<double>();
  return gp;
}

void game_design(const Json& c, Output& out, int) {
  out.body << io::to_json(design_ai_game(game_params(c))).dump(2) << '\n';
}

void game_verify(const Json& c, Output& out, int) {
  GameParams gp = game_params(c);
  AiDesign d = design_ai_game(gp);
  Json j = {{"design", io::to_json(d)}};
  j["report"] = io::to_json(verify_equilibria(d, gp));
  out.body << j.dump(2) << '\n';
}

void game_simulate(const Json& c, Output& out, int) {
  GameParams gp = game_params(c);
  AiDesign d = design_ai_game(gp);
  if (!d.feasible) throw std::runtime_error("design infeasible: " + d.reason);
  double x = c.at("x").get<double>();
  if (x < 0) x = d.eta;
  std::string act = c.at("actuality").get<std::string>();
  if (act != "F" && act != "R") throw io::ConfigError("actuality must be F or R");
  Rng rng = make_rng(seed_of(c));
  io::write_beta_trace_csv(out.body, simulate_tagging_game(mix_x(x, gp), d, gp, act == "F" ? Actuality::F : Actuality::R,
                                                           c.at("k_max").get<long long>(), rng));
}

void game_study(const Json& c, Output& out, int) {
  StudyConfig cfg;
  cfg.samples = c.at("samples").get<long long>();
  cfg.d = c.at("d").get<double>();
  cfg.theta = c.at("theta").get<double>();
  cfg.seed = seed_of(c);
  StudySummary s = run_study(cfg);
  io::write_study_csv(out.body, s);
  std::cerr << Json{{"feasible_fraction", s.feasible_fraction},
                    {"verified_fraction", s.verified_fraction},
                    {"low_degradation_fraction", s.low_degradation_fraction}}
                   .dump()
            << '\n';
}

template <class... Lists>
std::vector<ParamSpec> join(std::vector<ParamSpec> a, const Lists&... rest) {
  (a.insert(a.end(), rest.begin(), rest.end()), ...);
  return a;
}

std::vector<Command> commands() {
  std::vector<Command> v;
  v.push_back({"bp", "simulate", "simulate the embedded chain; CSV trajectory of the first replication",
               bp_specs(), true, bp_simulate});
  v.push_back({"bp", "ratios", "scaled ratios by the incremental update; CSV", bp_specs(), true, bp_ratios});
  v.push_back({"attack", "analyze", "regime, interior repeller and limit points; JSON", attack_specs(false), false,
               attack_analyze});
  v.push_back({"attack", "simulate", "simulate the attack process; CSV trajectory", attack_specs(true), true,
               attack_simulate});
  v.push_back({"wm", "optimize", "optimal eo mechanism; JSON", join(wm_specs(), std::vector{text("kind", "eo", "mechanism")}),
               false, wm_design});
  v.push_back({"wm", "design", "mechanism of a given kind; JSON",
               join(wm_specs(), std::vector{text_req("kind", "eo | ea | eh | eh2")}), false, wm_design});
  v.push_back({"wm", "learn", "two-timescale learning of (w, b); CSV trace k,w,b,beta",
               join(wm_specs(), std::vector{integer("budget", 100000, "read budget", 1),
                                            integer("trace_every", 1000, "trace stride", 1)}),
               true, wm_learn});
  v.push_back({"wm", "simulate", "tagging run under a designed mechanism; CSV k,beta",
               join(wm_specs(), std::vector{text("kind", "eo", "mechanism"), text("actuality", "F", "F | R"),
                                            integer("init_x", 0, "fake-tagged seed copies", 0),
                                            integer("init_y", 20, "real-tagged seed copies", 0),
                                            integer("max_events", 100000, "event cap", 1),
                                            integer("record_every", 100, "record stride", 1)}),
               true, wm_simulate});
  auto shares0 = std::vector{real("a0", 2, "initial total shares", 1.0), real("c0", 2, "initial current shares", 0.0)};
  v.push_back({"market", "metrics", "peak, life span and phase times; JSON", join(tef_specs(), shares0), false,
               market_metrics});
  v.push_back({"market", "closed-form", "epoch-sampled closed-form shares; CSV n,t,a,c",
               join(tef_specs(), shares0,
                    std::vector{integer("n_max", 0, "last epoch (0: life span)"),
                                flag("exact_times", false, "use harmonic epoch times")}),
               false, market_closed_form});
  v.push_back({"market", "simulate", "simulate the saturated process; CSV trajectory",
               join(tef_specs(), std::vector{integer("a0", 2, "initial shares", 1),
                                             integer("max_events", 1000000, "event cap", 1),
                                             integer("record_every", 1, "record stride", 1),
                                             integer("cap", 1000, "forwards cap per read", 0),
                                             text("law", "poisson", "poisson | binomial")}),
               true, market_simulate});
  v.push_back({"market", "fit", "estimate the forwards curve from graph runs; JSON",
               {text_req("graph", "edge-list file"), real("rho", 1.0, "forward probability", 0.0, 1.0),
                real("bin_width", 1000, "bin width in total shares", 1.0), integer("runs", 100, "runs", 1),
                integer("viral_threshold", 1000, "reach for a run to count", 1)},
               true, market_fit});
  v.push_back({"market", "propagate", "one propagation run on a graph; CSV event log",
               {text_req("graph", "edge-list file"), text("seeds", "0", "comma separated seed ids"),
                real("rho", 1.0, "forward probability", 0.0, 1.0)},
               true, market_propagate});
  v.push_back({"game", "design", "design the identification game; JSON", game_specs(), false, game_design});
  v.push_back({"game", "verify", "design and check the equilibria; JSON", game_specs(), false, game_verify});
  v.push_back({"game", "simulate", "tagging under the designed warning; CSV k,beta",
               join(game_specs(), std::vector{real("x", -1, "innate share (negative: designed value)"),
                                              text("actuality", "F", "F | R"),
                                              integer("k_max", 100000, "tags", 1)}),
               true, game_simulate});
  v.push_back({"game", "study", "random-configuration study; CSV per sample",
               {integer("samples", 10000, "samples", 1), real("d", 0.08, "normalized ability gap", 0.0, 1.0),
                real("theta", 0.75, "fake-post target", 0.0, 1.0)},
               true, game_study});
  return v;
}

std::string dashed(std::string k) {
  std::replace(k.begin(), k.end(), '_', '-');
  return k;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Branching-process simulators for viral markets and fake-post tagging"};
  app.require_subcommand(1);
  auto cmds = std::make_shared<std::vector<Command>>(commands());

  struct Bound {
    const Command* cmd = nullptr;
    CLI::App* app = nullptr;
    std::map<std::string, std::string> values;
    std::string config, out;
    long long seed = -1;
    long long replications = 0;
    int jobs = 1;
  };
  std::vector<std::unique_ptr<Bound>> bound;
  std::map<std::string, CLI::App*> groups;
  for (const auto& c : *cmds) {
    if (!groups.count(c.group)) {
      groups[c.group] = app.add_subcommand(c.group, c.group + " commands");
      groups[c.group]->require_subcommand(1);
    }
    auto b = std::make_unique<Bound>();
    b->cmd = &c;
    b->app = groups[c.group]->add_subcommand(c.name, c.help);
    b->app->add_option("--config", b->config, "JSON file with parameters");
    b->app->add_option("--out", b->out, "artifact path (default: stdout)");
    b->app->add_option("--jobs", b->jobs, "worker threads for replications")->check(CLI::PositiveNumber);
    if (c.randomized) b->app->add_option("--seed", b->seed, "64-bit seed (generated and recorded if omitted)");
    bool has_reps = std::any_of(c.specs.begin(), c.specs.end(), [](const ParamSpec& s) { return s.key == "replications"; });
    if (has_reps) b->app->add_option("--replications", b->replications, "independent runs")->check(CLI::PositiveNumber);
    for (const auto& s : c.specs) {
      if (s.key == "replications") continue;
      std::string help = s.help;
      if (!s.default_value.is_null()) help += " [default: " + s.default_value.dump() + "]";
      else help += " [required]";
      auto* opt = b->app->add_option_function<std::string>(
          "--" + dashed(s.key), [bp = b.get(), key = s.key](const std::string& v) { bp->values[key] = v; }, help);
      (void)opt;
    }
    bound.push_back(std::move(b));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  for (auto& b : bound) {
    if (!b->app->parsed()) continue;
    try {
      std::vector<ParamSpec> specs = b->cmd->specs;
      if (b->cmd->randomized) specs.push_back(integer("seed", 0, "seed"));
      Json file = b->config.empty() ? Json(nullptr) : io::load_json_file(b->config);
      auto overrides = b->values;
      if (b->replications > 0) overrides["replications"] = std::to_string(b->replications);
      if (b->cmd->randomized) {
        bool in_file = file.is_object() && file.contains("seed");
        if (b->seed >= 0) {
          overrides["seed"] = std::to_string(b->seed);
        } else if (!in_file) {
          std::random_device rd;
          long long s = static_cast<long long>(((static_cast<std::uint64_t>(rd()) << 31) ^ rd()) & 0x7fffffffffffffffULL);
          overrides["seed"] = std::to_string(s);
          std::cerr << "seed: " << s << '\n';
        }
      }
      Json cfg = io::resolve_config(specs, file, overrides);
      Output out;
      out.path = b->out;
      b->cmd->run(cfg, out, b->jobs);
      if (out.path.empty()) {
        std::cout << out.body.str();
      } else {
        io::write_text_file(out.path, out.body.str());
        io::write_text_file(io::sidecar_path(out.path), cfg.dump(2) + "\n");
      }
      return 0;
    } catch (const io::MissingParameter& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 2;
    } catch (const io::ConfigError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 1;
    }
  }
  return 1;
}
