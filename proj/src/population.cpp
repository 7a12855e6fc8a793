#include "bpsim/population.hpp"

#include <cmath>
#include <stdexcept>

namespace bpsim {

PopulationState PopulationState::initial(long long cx, long long cy) {
  if (cx < 0 || cy < 0) throw std::invalid_argument("initial counts must be nonnegative");
  PopulationState s;
  s.cx = cx;
  s.cy = cy;
  s.ax = cx;
  s.ay = cy;
  s.extinct = (cx + cy == 0);
  return s;
}

double PopulationState::beta() const {
  long long sc = cx + cy;
  return sc > 0 ? static_cast<double>(cx) / static_cast<double>(sc) : 0.0;
}

DeathModel DeathModel::unit() {
  DeathModel d;
  d.rate = [](PopType, int, const PopulationState&) { return 1.0; };
  return d;
}

std::vector<DeathEvent> death_probabilities(const PopulationState& s, const DeathModel& deaths) {
  if (s.extinct || s.current() == 0) throw std::logic_error("absorbing state has no death event");
  const double beta = s.beta();
  std::vector<DeathEvent> out;
  out.reserve(static_cast<std::size_t>(deaths.kinds_x + deaths.kinds_y));
  double norm = 0.0;
  for (int t = 0; t < 2; ++t) {
    PopType type = static_cast<PopType>(t);
    int kinds = (type == PopType::x) ? deaths.kinds_x : deaths.kinds_y;
    double share = (type == PopType::x) ? beta : 1.0 - beta;
    for (int k = 0; k < kinds; ++k) {
      double r = deaths.rate(type, k, s);
      if (!(r >= deaths.rate_floor) || !std::isfinite(r))
        throw std::domain_error("death rate below configured floor");
      double w = r * share;
      norm += w;
      out.push_back({type, k, w});
    }
  }
  for (auto& e : out) e.prob /= norm;
  return out;
}

PopulationState step_embedded(const PopulationState& s, const OffspringSample& o) {
  if (s.extinct) throw std::logic_error("absorbing state has no death event");
  if (o.own < 0) throw std::invalid_argument("invalid offspring sample");
  PopulationState t = s;
  long long& c_own = (o.parent == PopType::x) ? t.cx : t.cy;
  long long& a_own = (o.parent == PopType::x) ? t.ax : t.ay;
  long long& c_other = (o.parent == PopType::x) ? t.cy : t.cx;
  long long& a_other = (o.parent == PopType::x) ? t.ay : t.ax;
  if (c_own < 1) throw std::invalid_argument("invalid offspring sample");
  if (o.cross < 0 && -o.cross > c_other) throw std::invalid_argument("invalid offspring sample");
  c_own += o.own - 1;
  a_own += o.own;
  // Under attack the captured individuals leave both counts of the other
  // type, so its total can shrink.
  c_other += o.cross;
  a_other += o.cross;
  t.n = s.n + 1;
  t.extinct = (t.cx + t.cy == 0);
  return t;
}

RatioVector ratios(const PopulationState& s) {
  double n = s.n >= 1 ? static_cast<double>(s.n) : 1.0;
  RatioVector r;
  r.psi_c = static_cast<double>(s.cx + s.cy) / n;
  r.theta_c = static_cast<double>(s.cx) / n;
  r.psi_a = static_cast<double>(s.ax + s.ay) / n;
  r.theta_a = static_cast<double>(s.ax) / n;
  r.beta = r.psi_c > 0 ? r.theta_c / r.psi_c : 0.0;
  return r;
}

RatioVector ratios_recursive(const RatioVector& prev, const PopulationState& before,
                             const PopulationState& after) {
  const long long n = after.n;
  if (n <= 1) {
    // Epoch 0 values are raw counts, so the first step is a plain update.
    RatioVector r = prev;
    r.psi_c += static_cast<double>(after.current() - before.current());
    r.theta_c += static_cast<double>(after.cx - before.cx);
    r.psi_a += static_cast<double>(after.total() - before.total());
    r.theta_a += static_cast<double>(after.ax - before.ax);
    r.beta = r.psi_c > 0 ? r.theta_c / r.psi_c : 0.0;
    return r;
  }
  // Y_n = Y_{n-1} + (delta_n - Y_{n-1}) / n
  const double eps = 1.0 / static_cast<double>(n);
  auto upd = [&](double y, long long delta) { return y + eps * (static_cast<double>(delta) - y); };
  RatioVector r;
  r.psi_c = upd(prev.psi_c, after.current() - before.current());
  r.theta_c = upd(prev.theta_c, after.cx - before.cx);
  r.psi_a = upd(prev.psi_a, after.total() - before.total());
  r.theta_a = upd(prev.theta_a, after.ax - before.ax);
  r.beta = r.psi_c > 0 ? r.theta_c / r.psi_c : 0.0;
  return r;
}

Trajectory simulate(const OffspringSampler& sampler, const DeathModel& deaths,
                    const PopulationState& init, const SimOptions& opt, Rng& rng) {
  if (opt.max_events < 1) throw std::invalid_argument("max_events must be at least 1");
  Trajectory traj;
  PopulationState s = init;
  s.extinct = (s.current() == 0);
  double tau = 0.0;
  auto record = [&](const PopulationState& st, double t) {
    traj.points.push_back({st, ratios(st), t});
  };
  record(s, tau);
  const int kinds = deaths.kinds_x + deaths.kinds_y;
  std::vector<double> weights(static_cast<std::size_t>(kinds));
  while (!s.extinct && s.n < opt.max_events) {
    // Total event rate over all living individuals and kinds.
    double total = 0.0;
    int idx = 0;
    for (int t = 0; t < 2; ++t) {
      PopType type = static_cast<PopType>(t);
      int kk = (type == PopType::x) ? deaths.kinds_x : deaths.kinds_y;
      double count = static_cast<double>(type == PopType::x ? s.cx : s.cy);
      for (int k = 0; k < kk; ++k, ++idx) {
        double r = deaths.rate(type, k, s);
        if (!(r >= deaths.rate_floor) || !std::isfinite(r))
          throw std::domain_error("death rate below configured floor");
        weights[static_cast<std::size_t>(idx)] = r * count;
        total += r * count;
      }
    }
    tau += exponential(rng, total);
    double u = uniform01(rng) * total;
    int pick = 0;
    double acc = 0.0;
    for (; pick < kinds - 1; ++pick) {
      acc += weights[static_cast<std::size_t>(pick)];
      if (u < acc && weights[static_cast<std::size_t>(pick)] > 0) break;
    }
    while (weights[static_cast<std::size_t>(pick)] <= 0 && pick > 0) --pick;
    PopType type = pick < deaths.kinds_x ? PopType::x : PopType::y;
    int kind = pick < deaths.kinds_x ? pick : pick - deaths.kinds_x;
    OffspringSample o = sampler(s, type, kind, rng);
    o.parent = type;
    o.death_kind = kind;
    s = step_embedded(s, o);
    if (opt.record_every > 0 && (s.n % opt.record_every == 0 || s.extinct)) record(s, tau);
  }
  if (opt.record_every <= 0 && traj.points.back().state.n != s.n) record(s, tau);
  else if (opt.record_every > 0 && traj.points.back().state.n != s.n) record(s, tau);
  traj.final_state = s;
  traj.final_tau = tau;
  traj.extinct = s.extinct;
  return traj;
}

Trajectory simulate(const OffspringSampler& sampler, const DeathModel& deaths,
                    const PopulationState& init, const SimOptions& opt, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return simulate(sampler, deaths, init, opt, rng);
}

GrowthFit fit_growth(const Trajectory& t) {
  GrowthFit g;
  if (t.extinct || t.points.size() < 8) return g;
  std::size_t start = t.points.size() / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (std::size_t i = start; i < t.points.size(); ++i) {
    long long sc = t.points[i].state.current();
    if (sc <= 0) continue;
    double x = t.points[i].tau;
    double y = std::log(static_cast<double>(sc));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 4) return g;
  double md = static_cast<double>(m);
  double den = md * sxx - sx * sx;
  if (den <= 0) return g;
  g.rate = (md * sxy - sx * sy) / den;
  double icpt = (sy - g.rate * sx) / md;
  double sse = 0;
  for (std::size_t i = start; i < t.points.size(); ++i) {
    long long sc = t.points[i].state.current();
    if (sc <= 0) continue;
    double r = std::log(static_cast<double>(sc)) - (icpt + g.rate * t.points[i].tau);
    sse += r * r;
  }
  double sigma2 = sse / (md - 2.0);
  g.stderr_rate = std::sqrt(sigma2 * md / den);
  g.ok = true;
  return g;
}

DichotomyStats dichotomy(const std::vector<Trajectory>& runs) {
  DichotomyStats d;
  d.replications = static_cast<long long>(runs.size());
  std::vector<double> rates;
  for (const auto& t : runs) {
    if (t.extinct) {
      ++d.extinct;
      continue;
    }
    // S at the cap against S at half the cap.
    long long n_end = t.final_state.n;
    long long half = n_end / 2;
    long long s_half = -1;
    for (const auto& p : t.points) {
      if (p.state.n <= half) s_half = p.state.current();
      else break;
    }
    if (s_half >= 0 && t.final_state.current() >= s_half) {
      ++d.growing;
      GrowthFit g = fit_growth(t);
      if (g.ok) rates.push_back(g.rate);
    } else {
      ++d.unclassified;
    }
  }
  if (d.replications > 0) d.extinct_fraction = static_cast<double>(d.extinct) / static_cast<double>(d.replications);
  if (!rates.empty()) {
    double s = 0, ss = 0;
    for (double r : rates) s += r;
    d.mean_rate = s / static_cast<double>(rates.size());
    for (double r : rates) ss += (r - d.mean_rate) * (r - d.mean_rate);
    if (rates.size() > 1)
      d.rate_se = std::sqrt(ss / static_cast<double>(rates.size() - 1) / static_cast<double>(rates.size()));
  }
  return d;
}

std::vector<RatioVector> ratio_sequence(const Trajectory& t) {
  std::vector<RatioVector> out;
  out.reserve(t.points.size());
  for (const auto& p : t.points) out.push_back(p.ratio);
  return out;
}

std::string trajectory_csv_header() { return "epoch,tau,cx,cy,ax,ay,psi_c,theta_c,psi_a,theta_a,beta"; }

}  // namespace bpsim
