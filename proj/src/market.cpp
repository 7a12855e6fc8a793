#include "bpsim/market.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "bpsim/ode.hpp"

namespace bpsim {

namespace {
constexpr double kEuler = std::numbers::egamma;
}

void TefParams::validate() const {
  if (!(m_bar > 0) || !(kappa1 > 0) || !(kappa2 > 0) || !(a_break > 0))
    throw std::invalid_argument("market parameters must be positive");
  if (!(kappa1 > kappa2)) throw std::invalid_argument("kappa1 must exceed kappa2");
  if (!(rho > 0) || rho > 1) throw std::invalid_argument("rho must lie in (0,1]");
  if (!(rho * m_bar > 1)) throw std::invalid_argument("rho * m_bar must exceed 1");
}

double tef(double a, const TefParams& p) {
  double v = a <= p.a_break ? p.rho * (p.m_bar - p.kappa1 * a) : p.rho * (p.m_tilde() - p.kappa2 * a);
  return std::max(0.0, v);
}

Trajectory simulate_stpbp(const TefParams& p, const MarketSimConfig& cfg, Rng& rng) {
  if (cfg.a0 < 1) throw std::invalid_argument("a0 must be at least 1");
  if (cfg.cap < 0) throw std::invalid_argument("cap must be nonnegative");
  DeathModel deaths = DeathModel::unit();
  deaths.kinds_y = 0;
  OffspringSampler sampler = [&p, &cfg](const PopulationState& s, PopType, int, Rng& r) {
    double mean = tef(static_cast<double>(s.ax), p);
    long long draw = 0;
    if (cfg.law == OffspringLaw::poisson) {
      draw = poisson(r, mean);
    } else {
      long long trials = std::max<long long>(cfg.binomial_trials, static_cast<long long>(std::ceil(mean)));
      draw = trials > 0 ? binomial(r, trials, mean / static_cast<double>(trials)) : 0;
    }
    OffspringSample o;
    o.parent = PopType::x;
    o.own = std::min(draw, cfg.cap);
    return o;
  };
  SimOptions opt;
  opt.max_events = cfg.max_events;
  opt.record_every = cfg.record_every;
  return simulate(sampler, deaths, PopulationState::initial(cfg.a0, 0), opt, rng);
}

const PhaseConstants& ClosedForm::phase_at(double t) const {
  return (two_phase && t > tau_s) ? phase2 : phase1;
}

double ClosedForm::a(double t) const {
  double tt = std::min(t, tau_e);
  const PhaseConstants& w = phase_at(tt);
  return w.w1 - w.w2 * std::exp(-w.w3 * std::exp(tt));
}

double ClosedForm::c(double t) const {
  if (t >= tau_e) return 0.0;
  return c0 - a0 + a(t) + std::exp(-kEuler) * (1.0 - std::exp(t));
}

double ClosedForm::a_epoch(double n) const {
  double nn = std::min(n, n_e);
  const PhaseConstants& w = (two_phase && nn > n_s) ? phase2 : phase1;
  return w.w1 - w.w2 * std::exp(-nn * w.w3 * std::exp(kEuler));
}

double ClosedForm::c_epoch(double n) const {
  if (n >= n_e) return 0.0;
  return a_epoch(n) - n;
}

namespace {

PhaseConstants phase_constants(double m, double kappa, double rho, double a_start, double t_start) {
  PhaseConstants w;
  w.w1 = m / kappa;
  w.w3 = kappa * rho * std::exp(-kEuler);
  w.w2 = (w.w1 - a_start) * std::exp(w.w3 * std::exp(t_start));
  return w;
}

template <class F>
double bisect(F f, double lo, double hi, double tol) {
  double flo = f(lo);
  for (int i = 0; i < 400 && hi - lo > tol; ++i) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

ClosedForm closed_form(const TefParams& p, double a0, double c0) {
  p.validate();
  if (!(a0 >= 1) || !(c0 > 0) || c0 > a0) throw std::invalid_argument("initial shares must satisfy 0 < c0 <= a0");
  ClosedForm cf;
  cf.params = p;
  cf.a0 = a0;
  cf.c0 = c0;
  if (a0 < p.a_break) {
    cf.phase1 = phase_constants(p.m_bar, p.kappa1, p.rho, a0, 0.0);
    if (cf.phase1.w1 > p.a_break) {
      double x = std::log(cf.phase1.w2 / (cf.phase1.w1 - p.a_break)) / cf.phase1.w3;
      cf.tau_s = std::log(x);
      cf.n_s = std::exp(cf.tau_s - kEuler);
      cf.two_phase = true;
      cf.phase2 = phase_constants(p.m_tilde(), p.kappa2, p.rho, p.a_break, cf.tau_s);
    } else {
      // The break is never reached; the first slope governs throughout.
      cf.tau_s = std::numeric_limits<double>::infinity();
      cf.n_s = cf.tau_s;
    }
  } else {
    cf.phase1 = phase_constants(p.m_tilde(), p.kappa2, p.rho, a0, 0.0);
    cf.tau_s = 0.0;
    cf.n_s = 0.0;
  }
  // Extinction time: c is concave in e^t and positive at 0.
  cf.tau_e = std::numeric_limits<double>::infinity();
  auto cfun = [&](double t) { return cf.c(t); };
  double hi = (std::isfinite(cf.tau_s) ? cf.tau_s : 0.0) + 50.0;
  for (int i = 0; i < 20 && cfun(hi) >= 0.0; ++i) hi += 50.0;
  if (cfun(hi) >= 0.0) throw std::domain_error("degenerate parameters");
  cf.tau_e = bisect(cfun, 0.0, hi, 1e-8);

  // Life span: a_epoch(n) = n.
  cf.n_e = std::numeric_limits<double>::infinity();
  double w1max = std::max(cf.phase1.w1, cf.two_phase ? cf.phase2.w1 : 0.0);
  auto fe = [&](double n) { return cf.a_epoch(n) - n; };
  // Epoch 1 is the first read; the epoch form is not meaningful before it.
  if (!(w1max > 1) || fe(1.0) <= 0.0 || fe(w1max) >= 0.0) throw std::domain_error("degenerate parameters");
  double lo = 1.0, up = w1max;
  for (int i = 0; i < 400; ++i) {
    double mid = 0.5 * (lo + up);
    if (fe(mid) > 0) lo = mid;
    else up = mid;
    if (up - lo <= 1e-13 * std::max(1.0, up)) break;
  }
  cf.n_e = 0.5 * (lo + up);
  return cf;
}

MarketMetrics metrics(const ClosedForm& cf) {
  MarketMetrics m;
  m.n_e = cf.n_e;
  m.max_reach = cf.n_e;
  m.tau_s = cf.tau_s;
  m.tau_e = cf.tau_e;
  const double eg = std::exp(kEuler);
  auto peak_in = [&](const PhaseConstants& w, double& t_star) {
    double arg = w.w2 * w.w3 * eg;
    if (!(arg > 1.0)) return false;
    t_star = std::log(std::log(arg) / w.w3);
    m.c_star = w.w1 - (1.0 + std::log(arg)) / (w.w3 * eg);
    return true;
  };
  double t1 = 0, t2 = 0;
  bool ok1 = peak_in(cf.phase1, t1);
  double c1 = m.c_star;
  if (cf.two_phase && (!ok1 || t1 > cf.tau_s)) {
    if (peak_in(cf.phase2, t2) && t2 >= cf.tau_s) {
      m.t_star = t2;
      return m;
    }
  } else if (ok1 && t1 >= 0.0) {
    m.c_star = c1;
    m.t_star = t1;
    return m;
  }
  // The maximum sits at a boundary; fall back to the numeric value there.
  PeakResult pk = numeric_peak(cf);
  m.c_star = pk.value;
  m.t_star = pk.t;
  return m;
}

PeakResult numeric_peak(const ClosedForm& cf) {
  auto golden = [&](double lo, double hi) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
    double f1 = cf.c(x1), f2 = cf.c(x2);
    for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + r * (hi - lo);
        f2 = cf.c(x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - r * (hi - lo);
        f1 = cf.c(x1);
      }
    }
    double t = 0.5 * (lo + hi);
    return PeakResult{t, cf.c(t)};
  };
  std::vector<PeakResult> cand;
  cand.push_back({0.0, cf.c(0.0)});
  if (cf.two_phase && cf.tau_s > 0 && cf.tau_s < cf.tau_e) {
    cand.push_back(golden(0.0, cf.tau_s));
    cand.push_back(golden(cf.tau_s, cf.tau_e));
  } else {
    cand.push_back(golden(0.0, cf.tau_e));
  }
  return *std::max_element(cand.begin(), cand.end(),
                           [](const PeakResult& a, const PeakResult& b) { return a.value < b.value; });
}

std::vector<EpochRow> closed_form_epochs(const ClosedForm& cf, long long n_max, bool exact_times) {
  std::vector<EpochRow> rows;
  rows.reserve(static_cast<std::size_t>(std::max<long long>(n_max, 0)));
  for (long long n = 1; n <= n_max; ++n) {
    double nd = static_cast<double>(n);
    if (exact_times) {
      double t = harmonic(n);
      rows.push_back({n, t, cf.a(t), cf.c(t)});
    } else {
      rows.push_back({n, kEuler + std::log(nd), cf.a_epoch(nd), cf.c_epoch(nd)});
    }
  }
  return rows;
}

double extinction_prob_pgf(const std::function<double(double)>& pgf) {
  auto d = [&](double s) { return pgf(s) - s; };
  if (d(0.0) <= 0.0) return 0.0;
  const int grid = 4096;
  double prev = 0.0;
  for (int i = 1; i <= grid; ++i) {
    double s = static_cast<double>(i) / grid;
    if (d(s) <= 0.0) {
      if (s == 1.0 && d(s) == 0.0) {
        // Only f(1) = 1 was hit; check for a tangency just below 1.
        double lo = prev, hi = 1.0;
        bool found = false;
        for (int k = 0; k < 60; ++k) {
          double mid = 0.5 * (lo + hi);
          if (d(mid) <= 0.0) {
            found = true;
            break;
          }
          lo = mid;
        }
        if (!found) return 1.0;
      }
      double lo = prev, hi = s;
      for (int k = 0; k < 200 && hi - lo > 1e-15; ++k) {
        double mid = 0.5 * (lo + hi);
        if (d(mid) > 0.0) lo = mid;
        else hi = mid;
      }
      return hi;
    }
    prev = s;
  }
  return 1.0;
}

}  // namespace bpsim
