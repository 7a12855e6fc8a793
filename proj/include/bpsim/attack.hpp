#pragma once
// Two-type branching process where each parent may capture copies of the
// other type on death (viral competing markets).

#include <optional>

#include "bpsim/ode.hpp"
#include "bpsim/population.hpp"

namespace bpsim {

struct AttackLimits {
  double e_xx = 0, e_xy = 0, e_yy = 0, e_yx = 0;

  double m_tilde() const { return e_xx + e_xy - e_yy + e_yx; }
  double m_inf() const { return e_xx - e_yy; }
  void validate() const;  // throws on negative entries or e_xy == 0
};

ScalarField build_gbeta(const AttackLimits& e);
Vec4 attack_h(const AttackLimits& e, double beta);
bool in_set_E(const AttackLimits& e);

struct AttackAnalysis {
  bool in_E = false;
  std::optional<double> beta_r;  // interior repeller when in_E
  EquilibriumReport report;      // scalar classification lifted by attack_h
};

AttackAnalysis classify_regime_and_limits(const AttackLimits& e, const ClassifyOptions& opt = {});

struct AttackSamplerConfig {
  AttackLimits limits;
  long long own_floor = 2;      // own offspring are floor + Poisson(mean - floor)
  double transient_c = 0.0;     // means are limit + c / (current)^alpha
  double transient_alpha = 1.0;
};

// Offspring for given raw draws; the attack draw is capped at the other
// type's current count.
OffspringSample attack_offspring_from_draws(const PopulationState& s, PopType parent, long long own_draw,
                                            long long attack_draw);
OffspringSample sample_attack_offspring(const PopulationState& s, PopType parent,
                                        const AttackSamplerConfig& cfg, Rng& rng);
OffspringSampler make_attack_sampler(const AttackSamplerConfig& cfg);

}  // namespace bpsim
