#include "bpsim/game.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bpsim {

void GameParams::validate() const {
  if (!(alpha_R > 0) || !(alpha_F > alpha_R) || !(alpha_F < 1))
    throw std::invalid_argument("need 0 < alpha_R < alpha_F < 1");
  if (!(mua >= 0) || !(mua < 1)) throw std::invalid_argument("mua must lie in [0,1)");
  if (!(p > 0) || !(p < 1)) throw std::invalid_argument("p must lie in (0,1)");
  if (!(Q_p >= Q_np)) throw std::invalid_argument("need Q_p >= Q_np");
  if (!(C_e > 0)) throw std::invalid_argument("C_e must be positive");
  if (!(a > 0) || !(b > 0) || !(c > 0)) throw std::invalid_argument("response constants must be positive");
  if (!(w_fraction > 0) || !(w_fraction < 1)) throw std::invalid_argument("w_fraction must lie in (0,1)");
  if (!(eta_fraction > 0) || !(eta_fraction <= 1)) throw std::invalid_argument("eta_fraction must lie in (0,1]");
  if (!(gamma_margin > 0)) throw std::invalid_argument("gamma_margin must be positive");
}

Mix mix_x(double x, const GameParams& gp) { return {0.0, x, 1.0 - x - gp.mua}; }

namespace {

struct Shares {
  double eta = 0, eta_a = 0;  // innate and adversarial shares among participants
};

Shares shares(const Mix& mu, const GameParams& gp) {
  double part = mu.mu1 + mu.mu2 + gp.mua;
  if (!(part > 0)) return {};
  return {mu.mu1 / part, gp.mua / part};
}

double alpha_of(Actuality u, const GameParams& gp) { return u == Actuality::F ? gp.alpha_F : gp.alpha_R; }

// Slope of the composed response r(alpha_u, omega(beta)) = min{slope * beta, 1}.
double composed_slope(const AiDesign& d, const GameParams& gp, Actuality u) {
  double rel = u == Actuality::F ? std::pow(gp.ratio(), gp.a) : 1.0;
  return d.cw_alpha * rel;
}

double eta_star(double level, const GameParams& gp) { return (1.0 - level) * (1.0 - gp.mua) / (1.0 - gp.alpha_F); }

}  // namespace

double response(double alpha, double omega, const GameParams& gp) {
  if (omega <= 0) return 0.0;
  return std::min(gp.c * std::pow(alpha, gp.a) * std::pow(omega, gp.b), 1.0);
}

double game_warning(double beta, const AiDesign& d, const GameParams& gp) {
  if (beta <= 0) return 0.0;
  return std::pow(d.w, 1.0 / gp.b) * std::pow(gp.alpha_R, (1.0 - gp.a) / gp.b) * std::pow(beta, 1.0 / gp.b);
}

double tagging_drift(double beta, const Mix& mu, const AiDesign& d, const GameParams& gp, Actuality u) {
  Shares s = shares(mu, gp);
  double r = std::min(composed_slope(d, gp, u) * beta, 1.0);
  return alpha_of(u, gp) * s.eta + (1.0 - s.eta - s.eta_a) * r - beta;
}

double beta_fixed_point(const Mix& mu, const AiDesign& d, const GameParams& gp, Actuality u) {
  Shares s = shares(mu, gp);
  const double alpha = alpha_of(u, gp);
  const double slope = composed_slope(d, gp, u);
  const double warned = 1.0 - s.eta - s.eta_a;
  const double saturated = alpha * s.eta + warned;  // every warned user fake-tags
  const double rho = 1.0 - warned * slope;
  if (rho <= 0.0 || slope * saturated >= 1.0) return saturated;
  return alpha * s.eta / rho;
}

double gamma_lower_bound(double p, double eta, double mua) {
  return (1.0 - (eta + mua) * (1.0 - p)) / ((1.0 - p) * (1.0 - eta - mua));
}

double participation_reward(double C_e, double eta, double mua, double gamma) {
  return C_e * (1.0 - eta - mua + 1.0 / (gamma - 1.0));
}

AiDesign design_ai_game(const GameParams& gp) {
  gp.validate();
  AiDesign d;
  const double D = std::pow(gp.ratio(), gp.a);
  const double aR = gp.alpha_R, aF = gp.alpha_F, mua = gp.mua, delta = gp.delta, theta = gp.theta;
  d.delta_a = delta * (1.0 - mua);
  if (!(theta > std::max(aF, delta / D)) || theta > 1.0) {
    d.reason = "theta outside (max{alpha_F, delta/ratio^a}, 1]";
    return d;
  }
  if (!(delta > aR) || !(delta < theta)) {
    d.reason = "delta outside (alpha_R, theta)";
    return d;
  }
  const double da = d.delta_a;
  const double es = eta_star(theta, gp);
  const double f = (da - es * delta) / (D * (da - aR * es));
  if (theta > f) {
    d.theta_tilde = theta;
  } else {
    const double kappa = delta * (D * (1.0 - aF) - 1.0) - aR * D;
    const double K = kappa * kappa - 4.0 * delta * aR * aF * D;
    if (K < 0) {
      d.reason = "K_delta negative";
      return d;
    }
    const double root = (-kappa + std::sqrt(K)) / (2.0 * D * aR);
    const double eps = std::max(0.0, theta - root) + gp.theta_eps;
    d.theta_tilde = std::min(std::max(root, 1.0 - delta * (1.0 - aF) / aR) + eps, 1.0);
    d.adjusted = true;
  }
  d.eta_star = eta_star(d.theta_tilde, gp);
  const double lo = std::max(1.0, 1.0 / (D * d.theta_tilde)) / (1.0 - mua);
  const double hi = std::min(1.0 / da, (da - d.eta_star * aR) / (da * (1.0 - mua - d.eta_star)));
  if (!(hi > lo)) {
    d.reason = "empty warning interval";
    return d;
  }
  d.cw_alpha = lo + gp.w_fraction * (hi - lo);
  d.w = d.cw_alpha / (gp.c * aR);
  d.eta_bar = da * ((1.0 - mua) * d.cw_alpha - 1.0) / (d.cw_alpha * da - aR);
  if (!(d.eta_star > d.eta_bar)) {
    d.reason = "empty participation interval";
    return d;
  }
  d.eta = d.eta_bar + gp.eta_fraction * (d.eta_star - d.eta_bar);
  if (!(d.eta > 0) || !(d.eta < 1.0 - mua)) {
    d.reason = "participation share outside (0, 1 - mua)";
    return d;
  }
  const double p = gp.p;
  d.gamma_lower = gamma_lower_bound(p, d.eta, mua);
  d.gamma = d.gamma_lower + gp.gamma_margin;
  d.R = participation_reward(gp.C_e, d.eta, mua, d.gamma);
  d.x_eta = p / (d.gamma - 1.0) + p * (1.0 - mua - d.eta) + d.eta;
  d.feasible = true;
  return d;
}

double success_probability(const Mix& mu, const AiDesign& d, const GameParams& gp) {
  if (!(mu.mu1 + mu.mu2 > 0)) return 0.0;
  Shares s = shares(mu, gp);
  double bF = beta_fixed_point(mu, d, gp, Actuality::F);
  double bR = beta_fixed_point(mu, d, gp, Actuality::R);
  double theta_a = gp.theta * (1.0 - s.eta_a);
  double delta_a = gp.delta * (1.0 - s.eta_a);
  return gp.p * (bF >= theta_a ? 1.0 : 0.0) + (1.0 - gp.p) * (bR <= delta_a ? 1.0 : 0.0);
}

double utility_eval(int strategy, const Mix& mu, const AiDesign& d, const GameParams& gp) {
  if (strategy == 0) return gp.Q_np;
  if (strategy != 1 && strategy != 2) throw std::invalid_argument("strategy must be 0, 1 or 2");
  double P = success_probability(mu, d, gp);
  double denom = mu.mu1 + gp.mua + d.gamma * mu.mu2;
  double share = denom > 0 ? d.R * P / denom : 0.0;
  if (strategy == 1) return gp.Q_p + share;
  return gp.Q_p - gp.C_e + d.gamma * share;
}

NeReport verify_equilibria(const AiDesign& d, const GameParams& gp) {
  if (!d.feasible) throw std::logic_error("design is not feasible: " + d.reason);
  NeReport rep;
  const double mua = gp.mua;
  Mix me = mix_x(d.eta, gp);
  NeEntry main;
  main.x = d.eta;
  main.beta_F = beta_fixed_point(me, d, gp, Actuality::F);
  main.beta_R = beta_fixed_point(me, d, gp, Actuality::R);
  const double tol = 1e-12;
  if (!(main.beta_F >= d.theta_tilde * (1.0 - mua) - tol))
    throw std::logic_error("beta_F^eta >= theta_tilde (1 - mua) violated");
  if (!(main.beta_R <= d.delta_a + tol)) throw std::logic_error("beta_R^eta <= delta_a violated");
  main.ai = true;
  main.success = success_probability(me, d, gp);
  double u1 = utility_eval(1, me, d, gp), u2 = utility_eval(2, me, d, gp), u0 = utility_eval(0, me, d, gp);
  rep.utility_gap = u1 - u2;
  if (!(std::fabs(u1 - u2) <= 1e-10 * std::max(1.0, std::fabs(u1))))
    throw std::logic_error("U(1) = U(2) at the designed mix violated");
  if (!(u1 > u0)) throw std::logic_error("U(1) > U(0) at the designed mix violated");
  rep.equilibria.push_back(main);

  const double x = d.x_eta;
  if (x > d.eta_star && x < 1.0 - mua) {
    rep.second_ne_candidate = true;
    Mix mx = mix_x(x, gp);
    NeEntry sec;
    sec.x = x;
    sec.beta_F = beta_fixed_point(mx, d, gp, Actuality::F);
    sec.beta_R = beta_fixed_point(mx, d, gp, Actuality::R);
    if (!(sec.beta_R <= d.delta_a + tol)) throw std::logic_error("beta_R^x_eta <= delta_a violated");
    const double slopeF = composed_slope(d, gp, Actuality::F);
    const double xF = (1.0 - mua - 1.0 / slopeF) / (1.0 - gp.alpha_F);
    const double bound = x <= xF ? 1.0 / slopeF : gp.alpha_F * (1.0 - mua);
    if (!(sec.beta_F >= bound - 1e-12)) throw std::logic_error("beta_F^x_eta lower bound violated");
    const double theta_a = gp.theta * (1.0 - mua);
    rep.degradation = (theta_a - sec.beta_F) * 100.0 / theta_a;
    sec.success = success_probability(mx, d, gp);
    sec.ai = sec.beta_F >= theta_a && sec.beta_R <= d.delta_a;
    if (!sec.ai) {
      rep.second_ne = true;
      double v1 = utility_eval(1, mx, d, gp), v2 = utility_eval(2, mx, d, gp);
      if (!(std::fabs(v1 - v2) <= 1e-8 * std::max(1.0, std::fabs(v1))))
        throw std::logic_error("U(1) = U(2) at the second mix violated");
      rep.equilibria.push_back(sec);
    }
  }
  return rep;
}

std::vector<double> simulate_tagging_game(const Mix& mu, const AiDesign& d, const GameParams& gp, Actuality u,
                                          long long k_max, Rng& rng) {
  if (k_max < 1) throw std::invalid_argument("k_max must be at least 1");
  Shares s = shares(mu, gp);
  if (!(mu.mu1 + mu.mu2 + gp.mua > 0)) throw std::invalid_argument("no participants");
  const double alpha = alpha_of(u, gp);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(k_max));
  double beta = 0.0;
  for (long long k = 0; k < k_max; ++k) {
    double v = uniform01(rng);
    bool fake = false;
    if (v < s.eta) {
      fake = bernoulli(rng, alpha);
    } else if (v < 1.0 - s.eta_a) {
      fake = bernoulli(rng, response(alpha, game_warning(beta, d, gp), gp));
    }
    beta += ((fake ? 1.0 : 0.0) - beta) / static_cast<double>(k + 1);
    out.push_back(beta);
  }
  return out;
}

GameParams study_params(const StudyConfig& cfg, std::uint64_t index) {
  Rng rng = make_rng(cfg.seed, index);
  GameParams gp;
  gp.alpha_R = 0.25 + 0.05 * uniform01(rng);
  gp.mua = 0.2 * uniform01(rng);
  gp.a = 2.0 + uniform01(rng);
  gp.p = 0.5 * uniform01(rng);
  if (gp.p <= 0) gp.p = 1e-12;
  gp.alpha_F = gp.alpha_R / (1.0 - cfg.d);
  gp.delta = gp.alpha_R + 0.01;
  gp.theta = cfg.theta;
  return gp;
}

StudySummary run_study(const StudyConfig& cfg) {
  if (cfg.samples < 1) throw std::invalid_argument("samples must be at least 1");
  if (!(cfg.d > 0) || !(cfg.d < 1)) throw std::invalid_argument("d must lie in (0,1)");
  StudySummary sum;
  long long feasible = 0, verified = 0, low = 0;
  for (long long i = 0; i < cfg.samples; ++i) {
    StudySample s;
    s.params = study_params(cfg, static_cast<std::uint64_t>(i));
    AiDesign d = design_ai_game(s.params);
    s.feasible = d.feasible;
    if (!d.feasible) {
      s.error = d.reason;
    } else {
      ++feasible;
      try {
        NeReport rep = verify_equilibria(d, s.params);
        s.verified = true;
        s.ai = rep.equilibria.front().ai;
        s.second_ne = rep.second_ne;
        s.degradation = rep.degradation.value_or(0.0);
        ++verified;
        if (!rep.second_ne_candidate || s.degradation < 10.0) ++low;
      } catch (const std::logic_error& e) {
        s.error = e.what();
      }
    }
    sum.samples.push_back(std::move(s));
  }
  double n = static_cast<double>(cfg.samples);
  sum.feasible_fraction = static_cast<double>(feasible) / n;
  sum.verified_fraction = static_cast<double>(verified) / n;
  sum.low_degradation_fraction = static_cast<double>(low) / n;
  return sum;
}

}  // namespace bpsim
