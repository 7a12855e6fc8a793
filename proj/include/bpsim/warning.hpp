#pragma once
// Warning mechanisms for fake-post tagging: user behaviour, proportion
// fields, limit proportions, mechanism designs, the two-timescale learning
// scheme and Monte Carlo tagging runs.

#include <cstdint>
#include <string>
#include <vector>

#include "bpsim/ode.hpp"
#include "bpsim/population.hpp"

namespace bpsim {

enum class Actuality { R, F };
enum class WmKind { eo, ea, eh, eh2, learned };
const char* wm_kind_name(WmKind k);
WmKind parse_wm_kind(const std::string& s);

struct UserMix {
  double mu0 = 0, mu1 = 0, mu2 = 1, mua = 0;  // np, wi, ws, adversarial
  void validate() const;
};

struct PostParams {
  double eta = 0.5;      // share probability
  double alpha_x = 0.5;  // warning sensitivity with a fake tag
  double alpha_y = 0.4;  // warning sensitivity with a real tag
};

struct WmModel {
  PostParams fake, real;
  double m_f = 30;     // mean friend count
  double eta_a = 0.55;
  double rho = 0.5;    // un-aided to aided linkage
  double gamma = 0.1;  // prior warning offset

  const PostParams& post(Actuality u) const { return u == Actuality::F ? fake : real; }
  void validate() const;
};

struct MechanismDesign {
  WmKind kind = WmKind::eo;
  double w = 0, b = 0, zeta = 1.0;
  double delta_target = 0;
  std::vector<double> roots_F, roots_R;
  double qos = 0, iqos = 0;
  bool constraint_ok = false;
  // ea only
  double delta_a_threshold = 0;  // adversary share up to which no degradation occurs
  double beta_na = 0;            // fake-post limit of the design without adversaries
};

double warning_value(WmKind kind, double beta, const MechanismDesign& d, const WmModel& m, const UserMix& mix);
double gbeta_wm(double beta, Actuality u, const MechanismDesign& d, const WmModel& m, const UserMix& mix);
ScalarField wm_field(Actuality u, const MechanismDesign& d, const WmModel& m, const UserMix& mix);

struct RootBounds {
  double lower = 0, upper = 1;
};
RootBounds root_bounds(Actuality u, const WmModel& m, const UserMix& mix);

double iqos_factor(const WmModel& m, const UserMix& mix);
double delta_adjusted(const WmModel& m, const UserMix& mix, double delta);

struct LimitResult {
  std::vector<double> roots_F, roots_R;
  RootBounds bounds_F, bounds_R;
  double qos = 0, iqos = 0;
};
std::vector<double> wm_roots(Actuality u, const MechanismDesign& d, const WmModel& m, const UserMix& mix);
LimitResult limit_proportions(const MechanismDesign& d, const WmModel& m, const UserMix& mix);

// Closed-form b that places the real-post root exactly at delta.
double b_star(const WmModel& m, const UserMix& mix, double delta, double w);

// delta is the nominal real-post threshold. With iqos set, constraints are
// imposed on the adjusted threshold that ignores adversarial tags.
MechanismDesign optimize_eo(const WmModel& m, const UserMix& mix, double delta, bool iqos = true);
MechanismDesign design_ea(const WmModel& m, const UserMix& mix, double delta, bool iqos = true);
MechanismDesign design_eh(const WmModel& m, const UserMix& mix, double delta, bool iqos = true);
MechanismDesign design_eh2(const WmModel& m, const UserMix& mix, double delta, bool iqos = true);
MechanismDesign design_by_kind(WmKind kind, const WmModel& m, const UserMix& mix, double delta, bool iqos = true);
// Evaluates roots, qos and iqos of a design in place.
void evaluate_design(MechanismDesign& d, const WmModel& m, const UserMix& mix);

struct LearnConfig {
  long long budget = 100000;
  double kappa_offset = 1e-3;  // kappa = 1 - alpha_y^R / alpha_x^R + offset
  double eta0 = 0.008;
  double coin_c = 1.5, coin_p = 0.8;
  double step_c = 2.2, step_p = 0.7;
  double w0 = 6.0, b0 = 1e-4;
  long long seed_copies = 20;  // real-tagged copies at the start
  long long trace_every = 1000;
  bool iqos = true;  // steer the real-post proportion to the adjusted threshold
};

struct LearnTracePoint {
  long long k;
  double w, b, beta;
};

struct LearnResult {
  double w = 0, b = 0;
  long long epochs = 0;
  bool extinct = false;
  std::vector<LearnTracePoint> trace;
  double learned_iqos = 0;
};

// Projected stochastic steps of the two learning timescales.
double learn_w_update(double w, double eps, bool fake_tag, double kappa);
double learn_b_update(double b, double eps, double beta, double target);

LearnResult learn_wm(const LearnConfig& cfg, const WmModel& m, const UserMix& mix, double delta, std::uint64_t seed,
                     std::uint64_t replication = 0);

struct TaggingConfig {
  long long init_x = 0, init_y = 20;  // fake- and real-tagged seed copies
  long long max_events = 100000;
  long long record_every = 100;
};

// One Monte Carlo run of the tagging process for a post of actuality u.
Trajectory simulate_tagging(Actuality u, const MechanismDesign& d, const WmModel& m, const UserMix& mix,
                            const TaggingConfig& cfg, Rng& rng);
DeathModel wm_death_model(const UserMix& mix, std::vector<int>* kinds_out = nullptr);
OffspringSampler wm_sampler(Actuality u, const MechanismDesign& d, const WmModel& m, const UserMix& mix);

// Parameter sets used throughout the examples.
WmModel smart_model();  // mean friends 28, weak share probabilities
UserMix smart_mix(double mua);  // everyone participates with the warning
WmModel naive_model();        // mean friends 30, close sensitivities
UserMix naive_mix(double mua);

}  // namespace bpsim
