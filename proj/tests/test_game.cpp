#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "bpsim/game.hpp"
#include "bpsim/ode.hpp"
#include "doctest.h"

using namespace bpsim;

TEST_CASE("response function") {
  GameParams gp;
  CHECK(response(0.3, 0.0, gp) == 0.0);
  GameParams lin = gp;
  lin.a = lin.b = lin.c = 1.0;
  CHECK(response(0.5, 3.0, lin) == 1.0);
  CHECK(response(0.5, 1.0, lin) == doctest::Approx(0.5));
  // Composed with the warning the response is linear in beta.
  AiDesign d = design_ai_game(gp);
  REQUIRE(d.feasible);
  for (double b : {0.01, 0.05, 0.1}) {
    CHECK(response(gp.alpha_R, game_warning(b, d, gp), gp) == doctest::Approx(std::min(d.cw_alpha * b, 1.0)));
    CHECK(response(gp.alpha_F, game_warning(b, d, gp), gp) ==
          doctest::Approx(std::min(d.cw_alpha * std::pow(gp.ratio(), gp.a) * b, 1.0)));
  }
}

TEST_CASE("reward arithmetic") {
  CHECK(gamma_lower_bound(0.3, 0.2, 0.1) == doctest::Approx(0.79 / 0.49));
  CHECK(gamma_lower_bound(0.3, 0.2, 0.1) == doctest::Approx(1.6122).epsilon(1e-4));
  CHECK(participation_reward(1.0, 0.2, 0.1, 2.0) == doctest::Approx(1.7));
}

TEST_CASE("fixed points of the tagging dynamics") {
  GameParams gp;
  AiDesign d = design_ai_game(gp);
  REQUIRE(d.feasible);
  Mix innate{0.0, 1.0 - gp.mua, 0.0};
  CHECK(beta_fixed_point(innate, d, gp, Actuality::F) == doctest::Approx(gp.alpha_F * (1 - gp.mua)));
  CHECK(beta_fixed_point(innate, d, gp, Actuality::R) == doctest::Approx(gp.alpha_R * (1 - gp.mua)));
  Mix at_star = mix_x(d.eta_star, gp);
  CHECK(beta_fixed_point(at_star, d, gp, Actuality::F) == doctest::Approx(d.theta_tilde * (1 - gp.mua)).epsilon(1e-10));
}

TEST_CASE("fixed points: residual and agreement with the integrated ODE") {
  std::mt19937_64 g(31);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  int checked = 0;
  for (std::uint64_t i = 0; i < 400 && checked < 60; ++i) {
    StudyConfig sc;
    sc.d = 0.1;
    GameParams gp = study_params(sc, i);
    AiDesign d = design_ai_game(gp);
    if (!d.feasible) continue;
    Mix mu = mix_x(u01(g) * (1 - gp.mua), gp);
    for (auto act : {Actuality::F, Actuality::R}) {
      double fp = beta_fixed_point(mu, d, gp, act);
      CHECK(std::fabs(tagging_drift(fp, mu, d, gp, act)) <= 1e-10);
      // The approach from zero is governed by the linear rate below saturation.
      double rate = tagging_drift(0.0, mu, d, gp, act) - tagging_drift(1e-3, mu, d, gp, act);
      rate = std::max(std::fabs(rate) / 1e-3, 0.01);
      PicardOptions po;
      po.mesh_per_unit = 20;
      po.sweeps = 30;
      auto traj = picard_solve(
          [&](const std::vector<double>& y, double) { return std::vector<double>{tagging_drift(y[0], mu, d, gp, act)}; },
          {0.0}, 40.0 + 25.0 / rate, po);
      CHECK(std::fabs(traj.values.back()[0] - fp) <= 1e-4);
    }
    ++checked;
  }
  CHECK(checked >= 30);
}

TEST_CASE("fixed points order and move with the innate share") {
  GameParams gp;
  AiDesign d = design_ai_game(gp);
  REQUIRE(d.feasible);
  double prev_F = -1;
  for (double x = 0.0; x <= 1.0 - gp.mua + 1e-12; x += 0.05) {
    Mix mu = mix_x(std::min(x, 1.0 - gp.mua), gp);
    double bF = beta_fixed_point(mu, d, gp, Actuality::F), bR = beta_fixed_point(mu, d, gp, Actuality::R);
    CHECK(bF >= bR - 1e-12);
    CHECK(bF >= 0.0);
    CHECK(bF <= 1.0);
    // Beyond saturation more innate taggers lower the fake-post proportion.
    if (prev_F >= 0 && x > d.eta_star) CHECK(bF <= prev_F + 1e-12);
    prev_F = bF;
  }
}

TEST_CASE("design of the default game") {
  GameParams gp;
  AiDesign d = design_ai_game(gp);
  REQUIRE(d.feasible);
  CHECK(d.theta_tilde >= gp.theta);
  CHECK(d.eta > d.eta_bar);
  CHECK(d.eta < d.eta_star);
  CHECK(d.gamma > d.gamma_lower);
  NeReport rep = verify_equilibria(d, gp);
  REQUIRE(!rep.equilibria.empty());
  CHECK(rep.equilibria[0].ai);
  CHECK(rep.equilibria[0].beta_F >= d.theta_tilde * (1 - gp.mua) - 1e-12);
  CHECK(rep.equilibria[0].beta_R <= d.delta_a + 1e-12);
  CHECK(std::fabs(rep.utility_gap) <= 1e-10);
}

TEST_CASE("infeasible inputs are reported") {
  GameParams gp;
  gp.delta = 0.2;  // below alpha_R
  AiDesign d = design_ai_game(gp);
  CHECK_FALSE(d.feasible);
  CHECK(d.reason == "delta outside (alpha_R, theta)");
  CHECK_THROWS_AS(verify_equilibria(d, gp), std::logic_error);
  GameParams bad;
  bad.alpha_F = 0.2;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("utilities") {
  GameParams gp;
  AiDesign d = design_ai_game(gp);
  REQUIRE(d.feasible);
  Mix nobody{1.0 - gp.mua, 0.0, 0.0};
  CHECK(success_probability(nobody, d, gp) == 0.0);
  CHECK(utility_eval(1, nobody, d, gp) == gp.Q_p);
  CHECK(utility_eval(2, nobody, d, gp) == gp.Q_p - gp.C_e);
  CHECK(utility_eval(0, nobody, d, gp) == gp.Q_np);
  CHECK_THROWS(utility_eval(3, nobody, d, gp));
  Mix me = mix_x(d.eta, gp);
  CHECK(std::fabs(utility_eval(1, me, d, gp) - utility_eval(2, me, d, gp)) <= 1e-10);
}

TEST_CASE("tagging game Monte Carlo") {
  GameParams gp;
  gp.mua = 0.0;
  AiDesign d = design_ai_game(gp);
  Rng rng = make_rng(4);
  GameParams adv = gp;
  adv.mua = 1.0;
  auto z = simulate_tagging_game(Mix{0, 0, 0}, d, adv, Actuality::F, 1000, rng);
  for (double b : z) CHECK(b == 0.0);
  auto innate = simulate_tagging_game(Mix{0, 1, 0}, d, gp, Actuality::R, 100000, rng);
  CHECK(std::fabs(innate.back() - gp.alpha_R) < 0.01);

  GameParams dg;
  AiDesign dd = design_ai_game(dg);
  REQUIRE(dd.feasible);
  Mix me = mix_x(dd.eta, dg);
  double target = beta_fixed_point(me, dd, dg, Actuality::R);
  // Step sizes 1/k with a linear rate near 1/3 give error decay like k^(-1/3).
  double err5 = 0, err6 = 0;
  for (std::uint64_t s = 0; s < 30; ++s) {
    Rng r = make_rng(100, s);
    auto path = simulate_tagging_game(me, dd, dg, Actuality::R, 1000000, r);
    err5 += std::fabs(path[99999] - target);
    err6 += std::fabs(path.back() - target);
  }
  CHECK(err5 / 30 < 0.015);
  CHECK(err6 / 30 < 0.01);
  CHECK(err6 < err5);
}

TEST_CASE("study sampling is reproducible") {
  StudyConfig sc;
  sc.samples = 50;
  auto a = run_study(sc);
  auto b = run_study(sc);
  REQUIRE(a.samples.size() == 50);
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(a.samples[i].params.alpha_R == b.samples[i].params.alpha_R);
    CHECK(a.samples[i].degradation == b.samples[i].degradation);
    CHECK(a.samples[i].params.delta == doctest::Approx(a.samples[i].params.alpha_R + 0.01));
    CHECK(a.samples[i].params.alpha_F == doctest::Approx(a.samples[i].params.alpha_R / (1 - sc.d)));
  }
}
