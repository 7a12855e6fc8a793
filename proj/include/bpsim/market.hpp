#pragma once
// Saturated market: a single-type branching process whose expected forwards
// fall linearly (two slopes) with the total number of shares. Simulator,
// closed-form share trajectories, peak and life-span metrics, and the
// extinction probability of a Galton-Watson offspring law.

#include <functional>
#include <string>
#include <vector>

#include "bpsim/population.hpp"

namespace bpsim {

struct TefParams {
  double m_bar = 21.321042;  // expected forwards of a fresh post
  double kappa1 = 532e-6;    // slope before the break
  double kappa2 = 83e-6;     // slope after the break
  double a_break = 35000;    // total shares at the slope change
  double rho = 1.0;          // attractiveness

  double m_tilde() const { return m_bar - a_break * (kappa1 - kappa2); }
  void validate() const;  // throws std::invalid_argument
};

// Expected effective forwards at total shares a, clamped at 0.
double tef(double a, const TefParams& p);

enum class OffspringLaw { poisson, binomial };

struct MarketSimConfig {
  long long a0 = 2;
  long long max_events = 1000000;
  long long record_every = 1;
  OffspringLaw law = OffspringLaw::poisson;
  long long cap = 1000;          // upper bound on forwards per read
  long long binomial_trials = 100;  // binomial law uses Bin(trials, mean/trials)
};

// Embedded chain at read epochs; type x only (cx current, ax total).
Trajectory simulate_stpbp(const TefParams& p, const MarketSimConfig& cfg, Rng& rng);

struct PhaseConstants {
  double w1 = 0, w2 = 0, w3 = 0;
};

struct ClosedForm {
  TefParams params;
  double a0 = 0, c0 = 0;
  PhaseConstants phase1, phase2;
  bool two_phase = false;
  double tau_s = 0;   // time at which total shares reach the break
  double tau_e = 0;   // time at which current shares vanish
  double n_s = 0;     // epoch counterpart of tau_s
  double n_e = 0;

  double a(double t) const;
  double c(double t) const;
  // Epoch forms with t_n approximated by gamma + ln n.
  double a_epoch(double n) const;
  double c_epoch(double n) const;
  const PhaseConstants& phase_at(double t) const;
};

// Throws std::domain_error("degenerate parameters") when no life span exists.
ClosedForm closed_form(const TefParams& p, double a0, double c0);

struct MarketMetrics {
  double c_star = 0, n_e = 0, max_reach = 0, tau_s = 0, tau_e = 0;
  double t_star = 0;  // time of the analytic peak
};
MarketMetrics metrics(const ClosedForm& cf);

// Numeric maximum of c(.) over [0, tau_e] by golden-section search per phase.
struct PeakResult {
  double t = 0, value = 0;
};
PeakResult numeric_peak(const ClosedForm& cf);

struct EpochRow {
  long long n;
  double t, a, c;
};
// Epoch samples n = 1..n_max with exact harmonic times when exact_times is set.
std::vector<EpochRow> closed_form_epochs(const ClosedForm& cf, long long n_max, bool exact_times);

// Smallest fixed point of a probability generating function on [0, 1].
double extinction_prob_pgf(const std::function<double(double)>& pgf);

}  // namespace bpsim
