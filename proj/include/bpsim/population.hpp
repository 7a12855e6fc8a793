#pragma once
// Embedded-chain simulator for two-type branching processes whose offspring
// laws may depend on both the living (current) and ever-born (total) counts.

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bpsim/rng.hpp"

namespace bpsim {

enum class PopType { x = 0, y = 1 };

struct PopulationState {
  long long cx = 0;  // living x
  long long cy = 0;  // living y
  long long ax = 0;  // ever born x
  long long ay = 0;  // ever born y
  long long n = 0;   // death epoch index
  bool extinct = false;

  static PopulationState initial(long long cx, long long cy);
  long long current() const { return cx + cy; }
  long long total() const { return ax + ay; }
  // Fraction of x among the living; 0 when nobody is alive.
  double beta() const;
  bool operator==(const PopulationState&) const = default;
};

struct OffspringSample {
  PopType parent = PopType::x;
  int death_kind = 0;
  long long own = 0;    // offspring of the parent's type
  long long cross = 0;  // offspring of the other type; negative for attacks
};

// Death kinds per type and their rates. Rates must stay above rate_floor.
struct DeathModel {
  int kinds_x = 1;
  int kinds_y = 1;
  std::function<double(PopType, int, const PopulationState&)> rate;
  double rate_floor = 1e-12;

  static DeathModel unit();  // one kind per type, rate 1
};

struct DeathEvent {
  PopType type;
  int kind;
  double prob;
};

std::vector<DeathEvent> death_probabilities(const PopulationState& s, const DeathModel& deaths);

PopulationState step_embedded(const PopulationState& s, const OffspringSample& o);

struct RatioVector {
  double psi_c = 0, theta_c = 0, psi_a = 0, theta_a = 0, beta = 0;
  std::array<double, 4> as_array() const { return {psi_c, theta_c, psi_a, theta_a}; }
};

// Scaled counts at epoch s.n (epoch 0 uses divisor 1).
RatioVector ratios(const PopulationState& s);
// Incremental form of the same ratios: prev holds the epoch n-1 values and
// next the raw counts after epoch n.
RatioVector ratios_recursive(const RatioVector& prev, const PopulationState& before,
                             const PopulationState& after);

using OffspringSampler =
    std::function<OffspringSample(const PopulationState&, PopType, int, Rng&)>;

struct TrajectoryPoint {
  PopulationState state;
  RatioVector ratio;
  double tau = 0.0;
};

struct SimOptions {
  long long max_events = 1'000'000;
  long long record_every = 1;  // 0 disables recording (final point only)
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;  // epoch 0 first
  PopulationState final_state;
  double final_tau = 0.0;
  bool extinct = false;
};

Trajectory simulate(const OffspringSampler& sampler, const DeathModel& deaths,
                    const PopulationState& init, const SimOptions& opt, Rng& rng);
Trajectory simulate(const OffspringSampler& sampler, const DeathModel& deaths,
                    const PopulationState& init, const SimOptions& opt, std::uint64_t seed);

// Least-squares slope of ln(S^c) against tau over the second half of the
// recorded points of a surviving path.
struct GrowthFit {
  double rate = 0.0;
  double stderr_rate = 0.0;
  bool ok = false;
};
GrowthFit fit_growth(const Trajectory& t);

struct DichotomyStats {
  long long replications = 0;
  long long extinct = 0;
  long long growing = 0;       // survived and S_n >= S_{n/2} at the cap
  long long unclassified = 0;  // survived but shrinking at the cap
  double extinct_fraction = 0.0;
  double mean_rate = 0.0;  // mean fitted growth rate of growing paths
  double rate_se = 0.0;    // standard error of that mean
};
DichotomyStats dichotomy(const std::vector<Trajectory>& runs);

std::vector<RatioVector> ratio_sequence(const Trajectory& t);

std::string trajectory_csv_header();

}  // namespace bpsim
