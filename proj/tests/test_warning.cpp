#include <algorithm>
#include <cmath>
#include <random>

#include "bpsim/warning.hpp"
#include "doctest.h"

using namespace bpsim;

namespace {

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }
double min_of(const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); }

}  // namespace

TEST_CASE("warning values") {
  WmModel m = smart_model();
  UserMix mix = smart_mix(0.0);
  MechanismDesign d;
  d.kind = WmKind::eo;
  d.w = 1.0;
  d.b = 1.0;
  CHECK(warning_value(WmKind::eo, 0.0, d, m, mix) == doctest::Approx(0.1));
  CHECK(warning_value(WmKind::eo, 1.0, d, m, mix) == doctest::Approx(1.1));
  CHECK(warning_value(WmKind::eo, 0.5, d, m, mix) == doctest::Approx(0.6));
  d.b = 3.7;
  CHECK(warning_value(WmKind::eo, 0.0, d, m, mix) == doctest::Approx(m.gamma));
  CHECK(warning_value(WmKind::eo, 1.0, d, m, mix) == doctest::Approx(d.w + m.gamma));
  // Without adversaries the adversary-aware warning is the plain one.
  for (double b : {0.1, 0.4, 0.9}) CHECK(warning_value(WmKind::ea, b, d, m, mix) == warning_value(WmKind::eo, b, d, m, mix));
  CHECK(parse_wm_kind("eh2") == WmKind::eh2);
  CHECK_THROWS(parse_wm_kind("bogus"));
}

TEST_CASE("field sign at zero and kinks") {
  WmModel m = naive_model();
  UserMix mix = naive_mix(0.1);
  MechanismDesign d;
  d.w = 2.0;
  d.b = 0.5;
  for (auto u : {Actuality::F, Actuality::R}) CHECK(gbeta_wm(0.0, u, d, m, mix) > 0.0);
  auto f = wm_field(Actuality::F, d, m, mix);
  for (double k : f.kinks) {
    if (k <= 0.0) continue;
    double v = warning_value(d.kind, k, d, m, mix);
    bool hits = std::fabs(v * m.fake.alpha_x - 1.0) < 1e-9 || std::fabs(v * m.fake.alpha_y - 1.0) < 1e-9;
    CHECK(hits);
  }
}

TEST_CASE("eo design on the smart-user preset") {
  WmModel m = smart_model();
  auto d0 = optimize_eo(m, smart_mix(0.0), 0.02);
  CHECK(d0.w == doctest::Approx(1.0 / 0.85 - 0.1));
  CHECK(d0.w == doctest::Approx(1.0765).epsilon(1e-4));
  CHECK(d0.qos == doctest::Approx(0.99981).epsilon(0.002));
  if (d0.b > 0) CHECK(std::fabs(max_of(d0.roots_R) - d0.delta_target) < 1e-6);
  CHECK(d0.constraint_ok);

  // QoS under the nominal threshold, i-QoS under the adjusted one.
  auto d1 = optimize_eo(m, smart_mix(0.01), 0.02, false);
  CHECK(std::fabs(d1.qos - 0.89798) < 0.002);
  auto d2 = optimize_eo(m, smart_mix(0.02), 0.02, false);
  CHECK(std::fabs(d2.qos - 0.8174) < 0.002);
  auto i1 = optimize_eo(m, smart_mix(0.01), 0.02, true);
  CHECK(std::fabs(i1.iqos - 0.958) < 0.003);
  CHECK(i1.delta_target == doctest::Approx(delta_adjusted(m, smart_mix(0.01), 0.02)));

  // Slack threshold: the constraint holds with b = 0.
  auto loose = optimize_eo(m, smart_mix(0.0), 0.95, false);
  CHECK(loose.b == 0.0);
}

TEST_CASE("closed-form b places the real-post root at the threshold") {
  WmModel m = naive_model();
  UserMix mix = naive_mix(0.1);
  for (double w : {2.0, 5.0, 8.0}) {
    double t = 0.05;
    MechanismDesign d;
    d.w = w;
    d.b = b_star(m, mix, t, w);
    REQUIRE(d.b > 0);
    CHECK(gbeta_wm(t, Actuality::R, d, m, mix) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  }
}

TEST_CASE("limit proportions are monotone in the design parameters") {
  WmModel m = naive_model();
  UserMix mix = naive_mix(0.1);
  std::mt19937_64 g(4);
  std::uniform_real_distribution<double> uw(1.0, 9.0), ub(0.0, 2.0);
  for (int i = 0; i < 40; ++i) {
    MechanismDesign a, b;
    a.w = uw(g);
    a.b = ub(g);
    b = a;
    b.w = a.w + 0.5;
    CHECK(min_of(wm_roots(Actuality::F, b, m, mix)) >= min_of(wm_roots(Actuality::F, a, m, mix)) - 1e-9);
    b = a;
    b.b = a.b + 0.5;
    CHECK(max_of(wm_roots(Actuality::R, b, m, mix)) <= max_of(wm_roots(Actuality::R, a, m, mix)) + 1e-9);
  }
}

TEST_CASE("limit proportions respect the analytic bounds") {
  std::mt19937_64 g(8);
  std::uniform_real_distribution<double> uw(1.0, 9.0), ub(0.0, 2.0), ua(0.0, 0.3);
  for (int i = 0; i < 40; ++i) {
    WmModel m = (i % 2) ? naive_model() : smart_model();
    double mua = ua(g);
    UserMix mix = (i % 2) ? naive_mix(mua) : smart_mix(mua);
    MechanismDesign d;
    d.w = uw(g);
    d.b = ub(g);
    auto lr = limit_proportions(d, m, mix);
    for (double r : lr.roots_F) {
      CHECK(r >= lr.bounds_F.lower - 1e-9);
      CHECK(r <= lr.bounds_F.upper + 1e-9);
    }
    for (double r : lr.roots_R) {
      CHECK(r >= lr.bounds_R.lower - 1e-9);
      CHECK(r <= lr.bounds_R.upper + 1e-9);
    }
    CHECK(lr.iqos == doctest::Approx(lr.qos * iqos_factor(m, mix)));
  }
}

TEST_CASE("no-aid degenerate field has its root at zero") {
  WmModel m = naive_model();
  m.gamma = 0.0;
  UserMix mix{0.0, 0.0, 0.9, 0.1};
  MechanismDesign d;
  d.w = 0.0;
  d.b = 1.0;
  auto r = wm_roots(Actuality::F, d, m, mix);
  REQUIRE(r.size() == 1);
  CHECK(r[0] == 0.0);
}

TEST_CASE("adversary-aware and hybrid designs on the naive preset") {
  WmModel m = naive_model();
  auto eo = optimize_eo(m, naive_mix(0.1), 0.05);
  auto ea = design_ea(m, naive_mix(0.1), 0.05);
  auto eh = design_eh(m, naive_mix(0.1), 0.05);
  CHECK(ea.iqos > eo.iqos);
  CHECK(eh.iqos == doctest::Approx(0.7629).epsilon(0.005 / 0.7629));
  CHECK(eh.qos >= ea.qos - 1e-9);
  CHECK(eh.constraint_ok);
  // Small adversary share: the ea root does not drop below the adversary-free root.
  auto small = design_ea(m, naive_mix(0.001), 0.05);
  if (0.001 <= small.delta_a_threshold) CHECK(min_of(small.roots_F) >= small.beta_na - 1e-9);
}

TEST_CASE("eh2 design table") {
  WmModel m = naive_model();
  const double expected[4] = {0.8289, 0.8270, 0.8257, 0.8246};
  for (int i = 0; i < 4; ++i) {
    auto d = design_eh2(m, naive_mix(0.1 * i), 0.05);
    CHECK(d.w == doctest::Approx(1.0 / 0.12 - 0.1));
    CHECK(std::fabs(d.iqos - expected[i]) < 0.002);
  }
}

TEST_CASE("learning update arithmetic") {
  CHECK(learn_w_update(3.0, 0.1, true, 0.6) == doctest::Approx(3.0 - 0.06));
  CHECK(learn_w_update(1.01, 0.1, true, 0.6) == 1.0);
  CHECK(learn_w_update(3.0, 0.1, false, 0.6) == doctest::Approx(3.0 + 0.04));
  CHECK(learn_b_update(0.7, 0.3, 0.05, 0.05) == 0.7);
  CHECK(learn_b_update(0.01, 0.5, 0.0, 0.05) == 0.0);
}

TEST_CASE("learning runs are reproducible and traced") {
  LearnConfig cfg;
  cfg.budget = 5000;
  cfg.trace_every = 500;
  auto a = learn_wm(cfg, naive_model(), naive_mix(0.1), 0.05, 9, 2);
  auto b = learn_wm(cfg, naive_model(), naive_mix(0.1), 0.05, 9, 2);
  CHECK(a.w == b.w);
  CHECK(a.b == b.b);
  CHECK(a.trace.front().k == 0);
  CHECK(a.trace.back().k == a.epochs);
  CHECK(a.w >= 1.0);
  CHECK(a.b >= 0.0);
}

TEST_CASE("tagging runs: degenerate mixes") {
  WmModel m = naive_model();
  MechanismDesign d = optimize_eo(m, naive_mix(0.1), 0.05);
  TaggingConfig cfg;
  cfg.max_events = 2000;
  Rng rng = make_rng(1);
  auto none = simulate_tagging(Actuality::F, d, m, UserMix{1.0, 0.0, 0.0, 0.0}, cfg, rng);
  CHECK(none.extinct);
  CHECK(none.final_state.n == cfg.init_x + cfg.init_y);

  TaggingConfig adv = cfg;
  adv.init_x = 20;
  adv.init_y = 0;
  auto all_a = simulate_tagging(Actuality::F, d, m, UserMix{0.0, 0.0, 0.0, 1.0}, adv, rng);
  CHECK(all_a.final_state.ax == 20);
  if (!all_a.extinct) CHECK(all_a.final_state.beta() < 0.05);
}
