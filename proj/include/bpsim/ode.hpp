#pragma once
// Scalar proportion ODE classification, lifting to the four-dimensional
// ratio ODE, Picard iteration, and comparisons between stochastic
// approximation paths and ODE solutions.

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bpsim/population.hpp"

namespace bpsim {

using Vec4 = std::array<double, 4>;

struct ScalarField {
  std::function<double(double)> g;
  std::vector<double> kinks;  // known discontinuity or kink abscissas in [0,1]
};

enum class EqKind { attractor, repeller, saddle };
const char* eq_kind_name(EqKind k);

struct Equilibrium {
  double beta = 0.0;
  EqKind kind = EqKind::saddle;
  double basin_lo = 0.0;
  double basin_hi = 0.0;
  int left_sign = 0;   // sign of g just left of beta (0 at beta = 0)
  int right_sign = 0;  // sign of g just right of beta (0 at beta = 1)
};

enum class LiftKind { attractor, q_attractor };
const char* lift_kind_name(LiftKind k);

struct LiftedPoint {
  std::optional<double> beta;  // empty for the origin
  Vec4 h{};
  LiftKind kind = LiftKind::q_attractor;
};

struct EquilibriumReport {
  std::vector<Equilibrium> equilibria;  // sorted by beta
  std::vector<LiftedPoint> lifted;
  bool includes_zero_saddle = false;
  bool invariant_ok = true;  // g(0) >= 0 and g(1) <= 0

  std::vector<double> attractors() const;
  std::vector<double> roots() const;
};

struct ClassifyOptions {
  int grid_points = 10000;
  double refine_tol = 1e-12;
  // Bisection end points whose residual exceeds this are treated as jumps
  // across zero rather than roots.
  double jump_residual = 1e-6;
};

EquilibriumReport classify_scalar(const ScalarField& field, const ClassifyOptions& opt = {});

// Brute force reference: sign pattern of g on a uniform grid. Roots are
// reported at the midpoint of each sign-change cell or at exact zeros.
struct ScanRoot {
  double beta;
  EqKind kind;
};
std::vector<ScanRoot> dense_sign_scan(const std::function<double(double)>& g, int points);

using LiftMap = std::function<Vec4(double)>;
EquilibriumReport lift_limits(EquilibriumReport report, const LiftMap& h);

// Right-hand side of the autonomous ratio ODE for a lift map.
Vec4 full_rhs(const Vec4& y, const LiftMap& h);
double ratio_beta(const Vec4& y);

struct OdeTrajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> values;
  int sweeps = 0;
  double step = 0.0;
  std::vector<double> sweep_changes;  // sup distance between successive iterates

  std::vector<double> at(double t) const;  // linear interpolation
};

using OdeRhs = std::function<std::vector<double>(const std::vector<double>&, double)>;

struct PicardOptions {
  int sweeps = 60;
  int mesh_per_unit = 5000;
  // The horizon is split into windows of at most this length and iterated
  // window by window; the last iterate of one window seeds the next.
  double window = 1.0;
  double stop_change = 0.0;  // stop a window early once a sweep changes less
};

OdeTrajectory picard_solve(const OdeRhs& rhs, const std::vector<double>& y0, double T,
                           const PicardOptions& opt = {});
OdeTrajectory euler_solve(const OdeRhs& rhs, const std::vector<double>& y0, double T, double dt,
                          int record_every = 1);

// Exact harmonic partial sum and its generalized inverse max{n : H_n <= t}.
double harmonic(long long n);
long long eta_of_t(double t);

struct Means {
  double xx = 0, xy = 0, yx = 0, yy = 0;  // m_ij: mean j-offspring of an i parent
};

struct MeanModel {
  // Means at a population point (cx, cy, ax, ay), possibly fractional.
  std::function<Means(double, double, double, double)> at_state;
  // Limits as the population grows with x-proportion beta.
  std::function<Means(double)> limit;
};

Vec4 drift_from_means(double beta, const Means& m);
Vec4 autonomous_rhs(const Vec4& y, const MeanModel& model);
Vec4 nonauto_rhs(const Vec4& y, double t, const MeanModel& model);

// Single-type model from the running example: mean offspring 3 - 0.002 a
// until a = 400, then 1.2.
MeanModel example_one_model();
OffspringSampler example_one_sampler();

double finite_time_gap(const std::vector<RatioVector>& sa, const OdeTrajectory& ode,
                       long long n_start, double T);

enum class HoverResult { converged_attractor, converged_saddle, hovering, undecided };
const char* hover_name(HoverResult h);

struct HoverTarget {
  double value;
  bool saddle;
};

struct HoverOptions {
  double delta = 0.01;
  double delta1 = 0.05;
  double tail_fraction = 0.5;
};

HoverResult hover_classify(const std::vector<double>& betas, const std::vector<HoverTarget>& targets,
                           const HoverOptions& opt = {});

}  // namespace bpsim
