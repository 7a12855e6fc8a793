#pragma once
// Participation mean-field game for post tagging: polynomial response to a
// warning, fixed points of the tagging dynamics, the design of a game whose
// equilibrium identifies post actuality, equilibrium checks and utilities.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bpsim/rng.hpp"
#include "bpsim/warning.hpp"

namespace bpsim {

struct GameParams {
  double alpha_R = 0.27, alpha_F = 0.30;  // innate fake-tag probabilities
  double mua = 0.1;                       // adversary share
  double p = 0.3;                         // prior probability of a fake post
  double Q_p = 1.0, Q_np = 0.0;           // participation utilities
  double C_e = 1.0;                       // cost of processing a warning
  double a = 2.5, b = 1.0, c = 1.0;       // response exponents and scale
  double theta = 0.75, delta = 0.28;      // identification targets
  // Free choices of the design, as fractions of their admissible intervals.
  double w_fraction = 0.5;
  double eta_fraction = 0.5;
  double gamma_margin = 1e3;   // gamma = lower bound + margin
  double theta_eps = 1e-6;     // slack added to the adjusted target

  double ratio() const { return alpha_F / alpha_R; }
  void validate() const;  // throws std::invalid_argument
};

// Strategy shares (mu0, mu1, mu2): abstain, tag innately, tag with warning.
struct Mix {
  double mu0 = 0, mu1 = 0, mu2 = 0;
};
// (0, x, 1 - x - mua)
Mix mix_x(double x, const GameParams& gp);

struct AiDesign {
  bool feasible = false;
  std::string reason;
  bool adjusted = false;  // theta was raised
  double theta_tilde = 0;
  double w = 0;
  double cw_alpha = 0;  // c * w * alpha_R, the slope of the composed response
  double eta = 0, eta_bar = 0, eta_star = 0;
  double gamma = 0, gamma_lower = 0, R = 0;
  double x_eta = 0;
  double delta_a = 0;
};

double response(double alpha, double omega, const GameParams& gp);
double game_warning(double beta, const AiDesign& d, const GameParams& gp);

// Attractor of the tagging ODE for the given mix (closed form), and the
// drift whose zero it is.
double beta_fixed_point(const Mix& mu, const AiDesign& d, const GameParams& gp, Actuality u);
double tagging_drift(double beta, const Mix& mu, const AiDesign& d, const GameParams& gp, Actuality u);

// Smallest warned-user weight for which the design's mix is an equilibrium,
// and the reward that makes innate and warned taggers indifferent there.
double gamma_lower_bound(double p, double eta, double mua);
double participation_reward(double C_e, double eta, double mua, double gamma);

AiDesign design_ai_game(const GameParams& gp);

double success_probability(const Mix& mu, const AiDesign& d, const GameParams& gp);
double utility_eval(int strategy, const Mix& mu, const AiDesign& d, const GameParams& gp);

struct NeEntry {
  double x = 0;  // share of innate taggers
  bool ai = false;
  double beta_F = 0, beta_R = 0;
  double success = 0;
};

struct NeReport {
  std::vector<NeEntry> equilibria;
  bool second_ne_candidate = false;  // x_eta lies in (eta*, 1 - mua)
  bool second_ne = false;            // and it is not identifying
  std::optional<double> degradation; // percent shortfall of the fake-post target
  double utility_gap = 0;            // U(1) - U(2) at the designed mix
};

// Throws std::logic_error naming the first violated inequality.
NeReport verify_equilibria(const AiDesign& d, const GameParams& gp);

// Monte Carlo tagging sequence; returns beta after each of k_max tags.
std::vector<double> simulate_tagging_game(const Mix& mu, const AiDesign& d, const GameParams& gp, Actuality u,
                                          long long k_max, Rng& rng);

struct StudyConfig {
  long long samples = 10000;
  double d = 0.08;  // (alpha_F - alpha_R) / alpha_F
  std::uint64_t seed = 1;
  double theta = 0.75;
};

struct StudySample {
  GameParams params;
  bool feasible = false;
  bool ai = false;
  bool second_ne = false;
  double degradation = 0;  // 0 without a second equilibrium
  bool verified = false;
  std::string error;
};

struct StudySummary {
  std::vector<StudySample> samples;
  double feasible_fraction = 0;
  double verified_fraction = 0;
  double low_degradation_fraction = 0;  // no second NE or shortfall below 10%
};

GameParams study_params(const StudyConfig& cfg, std::uint64_t index);
StudySummary run_study(const StudyConfig& cfg);

}  // namespace bpsim
