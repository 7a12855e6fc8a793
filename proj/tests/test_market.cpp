#include <cmath>
#include <random>
#include <sstream>

#include "bpsim/graph.hpp"
#include "bpsim/market.hpp"
#include "bpsim/ode.hpp"
#include "doctest.h"

using namespace bpsim;

namespace {

TefParams fitted(double rho) {
  TefParams p;
  p.rho = rho;
  return p;
}

Graph graph_from(const std::string& text) {
  std::istringstream in(text);
  return parse_graph(in);
}

}  // namespace

TEST_CASE("expected forwards curve") {
  TefParams p = fitted(1.0);
  CHECK(tef(0.0, p) == doctest::Approx(21.321042));
  CHECK(tef(35000.0, p) == doctest::Approx(2.701042).epsilon(1e-12));
  CHECK(tef(35000.0 - 1e-7, p) == doctest::Approx(tef(35000.0 + 1e-7, p)).epsilon(1e-9));
  CHECK(tef(1e9, p) == 0.0);
  CHECK(tef(0.0, fitted(0.6)) == doctest::Approx(0.6 * 21.321042));
  TefParams bad = p;
  bad.kappa2 = 1.0;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("closed-form trajectory identities") {
  for (double rho : {0.4, 0.6, 1.0}) {
    ClosedForm cf = closed_form(fitted(rho), 2.0, 2.0);
    CHECK(std::fabs(cf.a(0.0) - 2.0) < 1e-9);
    CHECK(std::fabs(cf.c(0.0) - 2.0) < 1e-9);
    if (cf.two_phase) {
      const auto& p1 = cf.phase1;
      const auto& p2 = cf.phase2;
      double et = std::exp(cf.tau_s);
      double a1 = p1.w1 - p1.w2 * std::exp(-p1.w3 * et);
      double a2 = p2.w1 - p2.w2 * std::exp(-p2.w3 * et);
      CHECK(std::fabs(a1 - a2) < 1e-8);
      CHECK(a1 == doctest::Approx(35000.0).epsilon(1e-10));
    }
    for (double n = 1; n < cf.n_e; n += std::max(1.0, cf.n_e / 50)) CHECK(cf.c_epoch(n) == doctest::Approx(cf.a_epoch(n) - n));
    CHECK(std::fabs(cf.a_epoch(cf.n_e) - cf.n_e) < 1e-6);
    CHECK(std::fabs(cf.c(cf.tau_e)) < 1e-6 * std::max(1.0, cf.a(cf.tau_e)));
    MarketMetrics m = metrics(cf);
    PeakResult pk = numeric_peak(cf);
    CHECK(std::fabs(m.c_star - pk.value) <= 0.005 * pk.value);
    CHECK(m.max_reach == doctest::Approx(cf.a(cf.tau_e)));
  }
}

TEST_CASE("analytic peak agrees with numeric maximisation on random parameters") {
  std::mt19937_64 g(12);
  std::uniform_real_distribution<double> um(5, 30), uk1(2e-4, 1e-3), ufrac(0.05, 0.6), ua(5000, 40000), ur(0.3, 1.0);
  int checked = 0;
  for (int i = 0; i < 100; ++i) {
    TefParams p;
    p.m_bar = um(g);
    p.kappa1 = uk1(g);
    p.kappa2 = p.kappa1 * ufrac(g);
    p.a_break = ua(g);
    p.rho = ur(g);
    if (p.rho * p.m_bar <= 1.5) continue;
    ClosedForm cf;
    try {
      cf = closed_form(p, 2.0, 2.0);
    } catch (const std::domain_error&) {
      continue;
    }
    MarketMetrics m = metrics(cf);
    PeakResult pk = numeric_peak(cf);
    CHECK(std::fabs(m.c_star - pk.value) <= 0.005 * pk.value);
    ++checked;
  }
  CHECK(checked > 50);
}

TEST_CASE("invalid closed-form inputs") {
  CHECK_THROWS_WITH(closed_form(fitted(0.0), 2.0, 2.0), "rho must lie in (0,1]");
  CHECK_THROWS_WITH(closed_form(fitted(0.6), 2.0, 3.0), "initial shares must satisfy 0 < c0 <= a0");
}

TEST_CASE("epoch table uses exact harmonic times") {
  ClosedForm cf = closed_form(fitted(0.6), 2.0, 2.0);
  auto rows = closed_form_epochs(cf, 50, true);
  REQUIRE(rows.size() == 50);
  CHECK(rows[9].n == 10);
  CHECK(rows[9].t == doctest::Approx(harmonic(10)));
  CHECK(rows[9].a == doctest::Approx(cf.a(harmonic(10))));
}

TEST_CASE("market simulation bookkeeping") {
  TefParams p = fitted(0.6);
  MarketSimConfig cfg;
  cfg.max_events = 200000;
  Rng rng = make_rng(21);
  auto t = simulate_stpbp(p, cfg, rng);
  for (const auto& pt : t.points) CHECK(pt.state.ax - pt.state.cx == pt.state.n);
  CHECK(t.final_state.ax - t.final_state.cx == t.final_state.n);

  TefParams zero = fitted(0.0);
  auto z = simulate_stpbp(zero, cfg, rng);
  CHECK(z.extinct);
  CHECK(z.final_state.n == cfg.a0);

  MarketSimConfig bin = cfg;
  bin.law = OffspringLaw::binomial;
  auto b = simulate_stpbp(p, bin, rng);
  CHECK(b.final_state.ax - b.final_state.cx == b.final_state.n);
}

TEST_CASE("surviving market paths rise, fall and saturate") {
  TefParams p = fitted(0.6);
  MarketSimConfig cfg;
  cfg.record_every = 100;
  int survivors = 0;
  for (std::uint64_t r = 0; r < 20 && survivors < 3; ++r) {
    Rng rng = make_rng(5, r);
    auto t = simulate_stpbp(p, cfg, rng);
    if (t.final_state.ax < 1000) continue;
    ++survivors;
    CHECK(t.extinct);
    long long peak = 0;
    for (const auto& pt : t.points) peak = std::max(peak, pt.state.cx);
    CHECK(peak > 100);
    CHECK(t.final_state.cx == 0);
  }
  CHECK(survivors > 0);
}

TEST_CASE("extinction probability of offspring laws") {
  CHECK(extinction_prob_pgf([](double s) { return 0.25 + 0.75 * s * s; }) == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  CHECK(extinction_prob_pgf([](double s) { return 0.6 + 0.4 * s; }) == doctest::Approx(1.0));
  CHECK(extinction_prob_pgf([](double s) { return s; }) == 0.0);
  CHECK(extinction_prob_pgf([](double s) { return std::exp(1.5 * (s - 1)); }) == doctest::Approx(0.417188).epsilon(1e-5));
}

TEST_CASE("graph parsing and canonical emission") {
  Graph g = graph_from("# comment\n1 2\n2 3\n3 1\n1 1\n2 1\n");
  CHECK(g.nodes() == 3);
  CHECK(g.edges == 3);
  CHECK(emit_graph(g) == "1 2\n1 3\n2 3\n");
  CHECK(emit_graph(graph_from(emit_graph(g))) == emit_graph(g));
  CHECK(g.mean_degree() == doctest::Approx(2.0));
  CHECK_THROWS_AS(g.node(99), std::out_of_range);
  CHECK_THROWS_WITH(graph_from("1 2\nfoo bar\n"), "malformed edge at line 2");
  CHECK_THROWS_WITH(graph_from("1 2 3\n"), "malformed edge at line 1");
}

TEST_CASE("propagation on small graphs") {
  Graph tri = graph_from("1 2\n2 3\n1 3\n");
  Rng rng = make_rng(1);
  auto r = propagate_on_graph(tri, {1}, 1.0, rng);
  CHECK(r.reach == 3);
  CHECK(r.events.size() == 3);
  CHECK(r.events.back().current == 0);

  Graph star = graph_from("0 1\n0 2\n0 3\n0 4\n0 5\n");
  auto s = propagate_on_graph(star, {0}, 1.0, rng);
  CHECK(s.reach == 6);
  CHECK(s.peak_current == 5);

  auto none = propagate_on_graph(star, {0, 3}, 0.0, rng);
  CHECK(none.reach == 2);
  CHECK_THROWS(propagate_on_graph(star, {0, 0}, 1.0, rng));
  CHECK_THROWS(propagate_on_graph(star, {42}, 1.0, rng));
}

TEST_CASE("two-segment fit") {
  TefParams truth;
  std::mt19937_64 g(3);
  std::normal_distribution<double> noise(0.0, 0.05);
  std::vector<double> x, y, breaks;
  for (double a = 500; a < 60000; a += 1000) {
    x.push_back(a);
    y.push_back(tef(a, truth) + noise(g));
  }
  for (std::size_t i = 0; i + 1 < x.size(); ++i) breaks.push_back(0.5 * (x[i] + x[i + 1]));
  TefFit f = fit_two_segment(x, y, breaks);
  CHECK_FALSE(f.degenerate);
  CHECK(std::fabs(f.params.m_bar - truth.m_bar) <= 0.05 * truth.m_bar);
  CHECK(std::fabs(f.params.kappa1 - truth.kappa1) <= 0.05 * truth.kappa1);
  CHECK(std::fabs(f.params.kappa2 - truth.kappa2) <= 0.05 * truth.kappa2);
  CHECK(std::fabs(f.params.a_break - truth.a_break) <= 0.05 * truth.a_break);

  TefFit one = fit_two_segment({500.0}, {4.0}, {});
  CHECK(one.degenerate);
  CHECK(one.params.m_bar == doctest::Approx(4.0));
  TefFit flat = fit_two_segment({500, 1500, 2500, 3500}, {4, 4, 4, 4}, {1000, 2000, 3000});
  CHECK(flat.degenerate);
}

TEST_CASE("curve estimation on a small graph") {
  // Complete graph on 40 nodes: every run reaches everyone.
  std::ostringstream os;
  for (int i = 0; i < 40; ++i)
    for (int j = i + 1; j < 40; ++j) os << i << ' ' << j << '\n';
  Graph g = graph_from(os.str());
  TefEstimateConfig cfg;
  cfg.bin_width = 5;
  cfg.runs = 20;
  cfg.viral_threshold = 30;
  TefFit f = estimate_tef(g, cfg);
  CHECK(f.viral_runs == 20);
  CHECK(f.reach_mean == doctest::Approx(40.0));
  CHECK(!f.bins.empty());
  cfg.viral_threshold = 1000;
  CHECK_THROWS_WITH(estimate_tef(g, cfg), "insufficient data");
  // Parallel runs produce the same estimate.
  cfg.viral_threshold = 30;
  cfg.jobs = 4;
  TefFit p = estimate_tef(g, cfg);
  CHECK(p.params.m_bar == f.params.m_bar);
  CHECK(p.peak_current_mean == f.peak_current_mean);
}
