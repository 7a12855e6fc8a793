#include "bpsim/warning.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bpsim {

const char* wm_kind_name(WmKind k) {
  switch (k) {
    case WmKind::eo: return "eo";
    case WmKind::ea: return "ea";
    case WmKind::eh: return "eh";
    case WmKind::eh2: return "eh2";
    case WmKind::learned: return "learned";
  }
  return "?";
}

WmKind parse_wm_kind(const std::string& s) {
  if (s == "eo") return WmKind::eo;
  if (s == "ea") return WmKind::ea;
  if (s == "eh") return WmKind::eh;
  if (s == "eh2") return WmKind::eh2;
  if (s == "learned") return WmKind::learned;
  throw std::invalid_argument("unknown mechanism kind: " + s);
}

void UserMix::validate() const {
  if (mu0 < 0 || mu1 < 0 || mu2 < 0 || mua < 0) throw std::invalid_argument("user proportions must be nonnegative");
  if (std::fabs(mu0 + mu1 + mu2 + mua - 1.0) > 1e-9) throw std::invalid_argument("user proportions must sum to 1");
}

namespace {
// Designs shape the warning seen by warned users, so some must exist.
void require_warned(const UserMix& mix) {
  if (!(mix.mu2 > 0)) throw std::invalid_argument("mu2 must be positive");
}
}  // namespace

void WmModel::validate() const {
  for (const PostParams* p : {&fake, &real}) {
    if (!(p->eta > 0 && p->eta < 1)) throw std::invalid_argument("share probability must lie in (0,1)");
    if (!(p->alpha_x > 0 && p->alpha_y > 0)) throw std::invalid_argument("sensitivities must be positive");
  }
  if (!(m_f > 0)) throw std::invalid_argument("m_f must be positive");
  if (!(eta_a > 0 && eta_a < 1)) throw std::invalid_argument("eta_a must lie in (0,1)");
  if (!(rho > 0 && rho < 1)) throw std::invalid_argument("rho must lie in (0,1)");
  if (!(gamma > 0)) throw std::invalid_argument("gamma must be positive");
}

namespace {

double eo_warning(double beta, double w, double b, double gamma) {
  if (beta <= 0.0) return gamma;
  return w * beta / (beta + b * (1.0 - beta)) + gamma;
}

double adversary_term(double beta, const WmModel& m, const UserMix& mix) {
  if (mix.mua == 0.0 || mix.mu2 == 0.0 || beta <= 0.0) return 0.0;
  const auto& f = m.fake;
  return beta * mix.mua * m.eta_a / (mix.mu2 * f.eta * (beta * f.alpha_x + (1.0 - beta) * f.alpha_y));
}

}  // namespace

double warning_value(WmKind kind, double beta, const MechanismDesign& d, const WmModel& m, const UserMix& mix) {
  double base = eo_warning(beta, d.w, d.b, m.gamma);
  switch (kind) {
    case WmKind::eo:
    case WmKind::eh2:
    case WmKind::learned: return base;
    case WmKind::ea: return base + adversary_term(beta, m, mix);
    case WmKind::eh: return d.zeta * (base + adversary_term(beta, m, mix));
  }
  return base;
}

double gbeta_wm(double beta, Actuality u, const MechanismDesign& d, const WmModel& m, const UserMix& mix) {
  const auto& p = m.post(u);
  double om = warning_value(d.kind, beta, d, m, mix);
  double inner = -beta * mix.mu2 - beta * mix.mu1 * (1.0 - p.alpha_x * m.rho) +
                 (1.0 - beta) * mix.mu1 * m.rho * p.alpha_y +
                 mix.mu2 * (beta * std::min(om * p.alpha_x, 1.0) + (1.0 - beta) * std::min(om * p.alpha_y, 1.0));
  return inner * m.m_f * p.eta - beta * mix.mua * m.m_f * m.eta_a;
}

ScalarField wm_field(Actuality u, const MechanismDesign& d, const WmModel& m, const UserMix& mix) {
  ScalarField f;
  f.g = [=](double b) { return gbeta_wm(b, u, d, m, mix); };
  f.kinks.push_back(0.0);
  // Abscissas where a warning-aided tag probability reaches 1.
  const auto& p = m.post(u);
  for (double a : {p.alpha_x, p.alpha_y}) {
    auto h = [&](double b) { return warning_value(d.kind, b, d, m, mix) * a - 1.0; };
    const int n = 2000;
    double prev_x = 0.0, prev_v = h(0.0);
    for (int i = 1; i <= n; ++i) {
      double x = static_cast<double>(i) / n;
      double v = h(x);
      if ((prev_v < 0) != (v < 0)) {
        double lo = prev_x, hi = x, vlo = prev_v;
        for (int it = 0; it < 100; ++it) {
          double mid = 0.5 * (lo + hi);
          double vm = h(mid);
          if ((vm < 0) == (vlo < 0)) {
            lo = mid;
            vlo = vm;
          } else {
            hi = mid;
          }
        }
        f.kinks.push_back(0.5 * (lo + hi));
      }
      prev_x = x;
      prev_v = v;
    }
  }
  std::sort(f.kinks.begin(), f.kinks.end());
  return f;
}

RootBounds root_bounds(Actuality u, const WmModel& m, const UserMix& mix) {
  const auto& p = m.post(u);
  double q = (mix.mu2 + mix.mu1 * (1.0 - (p.alpha_x - p.alpha_y) * m.rho)) * p.eta + mix.mua * m.eta_a;
  RootBounds r;
  r.lower = mix.mu1 * m.rho * p.alpha_y * p.eta / q;
  r.upper = (mix.mu2 + mix.mu1 * m.rho * p.alpha_y) * p.eta / q;
  return r;
}

double iqos_factor(const WmModel& m, const UserMix& mix) {
  double base = (mix.mu1 + mix.mu2) * m.fake.eta;
  return (base + mix.mua * m.eta_a) / base;
}

double delta_adjusted(const WmModel& m, const UserMix& mix, double delta) {
  double base = (mix.mu1 + mix.mu2) * m.real.eta;
  return delta * base / (base + mix.mua * m.eta_a);
}

std::vector<double> wm_roots(Actuality u, const MechanismDesign& d, const WmModel& m, const UserMix& mix) {
  EquilibriumReport rep = classify_scalar(wm_field(u, d, m, mix));
  std::vector<double> r = rep.roots();
  if (r.empty()) throw std::logic_error("no limit proportion found");
  return r;
}

LimitResult limit_proportions(const MechanismDesign& d, const WmModel& m, const UserMix& mix) {
  LimitResult out;
  out.roots_F = wm_roots(Actuality::F, d, m, mix);
  out.roots_R = wm_roots(Actuality::R, d, m, mix);
  out.bounds_F = root_bounds(Actuality::F, m, mix);
  out.bounds_R = root_bounds(Actuality::R, m, mix);
  out.qos = *std::min_element(out.roots_F.begin(), out.roots_F.end());
  out.iqos = out.qos * iqos_factor(m, mix);
  return out;
}

void evaluate_design(MechanismDesign& d, const WmModel& m, const UserMix& mix) {
  LimitResult lr = limit_proportions(d, m, mix);
  d.roots_F = lr.roots_F;
  d.roots_R = lr.roots_R;
  d.qos = lr.qos;
  d.iqos = lr.iqos;
  d.constraint_ok = *std::max_element(d.roots_R.begin(), d.roots_R.end()) <= d.delta_target + 1e-9;
}

double b_star(const WmModel& m, const UserMix& mix, double delta, double w) {
  const auto& r = m.real;
  double s = delta * r.alpha_x + (1.0 - delta) * r.alpha_y;
  double den = delta * ((mix.mu1 + mix.mu2) * r.eta + mix.mua * m.eta_a) - r.eta * (mix.mu1 * m.rho + mix.mu2 * m.gamma) * s;
  return delta / (1.0 - delta) * (w * r.eta * mix.mu2 * s / den - 1.0);
}

namespace {

double target_delta(const WmModel& m, const UserMix& mix, double delta, bool iqos) {
  if (!(delta > 0 && delta < 1)) throw std::invalid_argument("delta must lie in (0,1)");
  return iqos ? delta_adjusted(m, mix, delta) : delta;
}

// Chooses b for an eo-shaped warning with scale w so the real-post root
// does not exceed the target.
double choose_b(const WmModel& m, const UserMix& mix, double target, double w) {
  if (root_bounds(Actuality::R, m, mix).lower >= target) throw std::domain_error("constraint unattainable");
  MechanismDesign probe;
  probe.kind = WmKind::eo;
  probe.w = w;
  probe.b = 0.0;
  auto r0 = wm_roots(Actuality::R, probe, m, mix);
  if (*std::max_element(r0.begin(), r0.end()) <= target) return 0.0;
  double b = b_star(m, mix, target, w);
  if (!(b >= 0.0) || !std::isfinite(b)) throw std::domain_error("constraint unattainable");
  return b;
}

}  // namespace

MechanismDesign optimize_eo(const WmModel& m, const UserMix& mix, double delta, bool iqos) {
  m.validate();
  mix.validate();
  require_warned(mix);
  MechanismDesign d;
  d.kind = WmKind::eo;
  d.delta_target = target_delta(m, mix, delta, iqos);
  d.w = 1.0 / m.fake.alpha_x - m.gamma;
  d.b = choose_b(m, mix, d.delta_target, d.w);
  evaluate_design(d, m, mix);
  return d;
}

MechanismDesign design_ea(const WmModel& m, const UserMix& mix, double delta, bool iqos) {
  m.validate();
  mix.validate();
  require_warned(mix);
  UserMix na = mix;
  na.mu0 += na.mua;
  na.mua = 0.0;
  // Without adversaries both thresholds coincide.
  MechanismDesign base = optimize_eo(m, na, delta, false);
  MechanismDesign d;
  d.kind = WmKind::ea;
  d.w = base.w;
  d.b = base.b;
  d.delta_target = target_delta(m, mix, delta, iqos);
  d.beta_na = base.qos;
  const auto& f = m.fake;
  double om = eo_warning(d.beta_na, d.w, d.b, m.gamma);
  d.delta_a_threshold = mix.mu2 * f.eta * (1.0 / f.alpha_x - om) *
                        (d.beta_na * f.alpha_x + (1.0 - d.beta_na) * f.alpha_y) / (d.beta_na * m.eta_a);
  evaluate_design(d, m, mix);
  return d;
}

MechanismDesign design_eh(const WmModel& m, const UserMix& mix, double delta, bool iqos) {
  MechanismDesign d = design_ea(m, mix, delta, iqos);
  d.kind = WmKind::eh;
  const double t = d.delta_target;
  const auto& r = m.real;
  MechanismDesign ea = d;
  ea.kind = WmKind::ea;
  ea.zeta = 1.0;
  double om_t = warning_value(WmKind::ea, t, ea, m, mix);
  double num = t * (mix.mu2 * r.eta + mix.mu1 * (1.0 - r.alpha_x * m.rho) * r.eta + mix.mua * m.eta_a) -
               (1.0 - t) * mix.mu1 * m.rho * r.alpha_y * r.eta;
  double zbar = num / (mix.mu2 * om_t * (t * r.alpha_x + (1.0 - t) * r.alpha_y) * r.eta);
  double lowF = root_bounds(Actuality::F, m, mix).lower;
  if (zbar < 1.0 / (r.alpha_y * om_t) || (lowF == 0.0 && d.b == 0.0)) {
    d.zeta = zbar;
  } else {
    d.zeta = 1.0 / (warning_value(WmKind::ea, lowF, ea, m, mix) * m.fake.alpha_y);
  }
  evaluate_design(d, m, mix);
  return d;
}

MechanismDesign design_eh2(const WmModel& m, const UserMix& mix, double delta, bool iqos) {
  m.validate();
  mix.validate();
  require_warned(mix);
  if (!(m.real.alpha_x > 0 && m.real.alpha_x < 1)) throw std::invalid_argument("alpha_x^R must lie in (0,1)");
  MechanismDesign d;
  d.kind = WmKind::eh2;
  d.delta_target = target_delta(m, mix, delta, iqos);
  d.w = 1.0 / m.real.alpha_x - m.gamma;
  d.b = choose_b(m, mix, d.delta_target, d.w);
  evaluate_design(d, m, mix);
  return d;
}

MechanismDesign design_by_kind(WmKind kind, const WmModel& m, const UserMix& mix, double delta, bool iqos) {
  switch (kind) {
    case WmKind::eo: return optimize_eo(m, mix, delta, iqos);
    case WmKind::ea: return design_ea(m, mix, delta, iqos);
    case WmKind::eh: return design_eh(m, mix, delta, iqos);
    case WmKind::eh2: return design_eh2(m, mix, delta, iqos);
    case WmKind::learned: break;
  }
  throw std::invalid_argument("learned mechanisms come from wm learn");
}

namespace {

enum UserType { np_user = 0, wi_user = 1, ws_user = 2, adv_user = 3 };

struct ReadOutcome {
  bool fake_tag;
  long long shares;
};

long long friends_shares(Rng& rng, double mean_friends, double p) {
  long long f = geometric_with_mean(rng, mean_friends);
  return binomial(rng, f, std::clamp(p, 0.0, 1.0));
}

// One read by a user of the given type holding a copy with the given tag.
ReadOutcome read_copy(int user, bool fake_tag_in, double omega, const PostParams& p, const WmModel& m, Rng& rng) {
  ReadOutcome r{false, 0};
  double a = fake_tag_in ? p.alpha_x : p.alpha_y;
  switch (user) {
    case np_user: return r;
    case wi_user: r.fake_tag = bernoulli(rng, a * m.rho); break;
    case ws_user: r.fake_tag = bernoulli(rng, std::min(a * omega, 1.0)); break;
    case adv_user:
      r.fake_tag = false;
      r.shares = friends_shares(rng, m.m_f, m.eta_a);
      return r;
    default: break;
  }
  r.shares = friends_shares(rng, m.m_f, p.eta);
  return r;
}

OffspringSample to_offspring(PopType parent, const ReadOutcome& r) {
  OffspringSample o;
  o.parent = parent;
  bool same = (parent == PopType::x) == r.fake_tag;
  o.own = same ? r.shares : 0;
  o.cross = same ? 0 : r.shares;
  return o;
}

}  // namespace

DeathModel wm_death_model(const UserMix& mix, std::vector<int>* kinds_out) {
  std::vector<int> kinds;
  std::vector<double> rates;
  const double mus[4] = {mix.mu0, mix.mu1, mix.mu2, mix.mua};
  for (int k = 0; k < 4; ++k)
    if (mus[k] > 0.0) {
      kinds.push_back(k);
      rates.push_back(mus[k]);
    }
  if (kinds.empty()) throw std::invalid_argument("no user types present");
  DeathModel d;
  d.kinds_x = d.kinds_y = static_cast<int>(kinds.size());
  d.rate = [rates](PopType, int k, const PopulationState&) { return rates[static_cast<std::size_t>(k)]; };
  if (kinds_out) *kinds_out = kinds;
  return d;
}

OffspringSampler wm_sampler(Actuality u, const MechanismDesign& d, const WmModel& m, const UserMix& mix) {
  std::vector<int> kinds;
  wm_death_model(mix, &kinds);
  return [=](const PopulationState& s, PopType parent, int kind, Rng& rng) {
    int user = kinds[static_cast<std::size_t>(kind)];
    double om = user == ws_user ? warning_value(d.kind, s.beta(), d, m, mix) : 0.0;
    return to_offspring(parent, read_copy(user, parent == PopType::x, om, m.post(u), m, rng));
  };
}

Trajectory simulate_tagging(Actuality u, const MechanismDesign& d, const WmModel& m, const UserMix& mix,
                            const TaggingConfig& cfg, Rng& rng) {
  if (cfg.init_x + cfg.init_y < 1) throw std::invalid_argument("need at least one seed copy");
  mix.validate();
  SimOptions opt;
  opt.max_events = cfg.max_events;
  opt.record_every = cfg.record_every;
  return simulate(wm_sampler(u, d, m, mix), wm_death_model(mix), PopulationState::initial(cfg.init_x, cfg.init_y),
                  opt, rng);
}

double learn_w_update(double w, double eps, bool fake_tag, double kappa) {
  return std::max(1.0, w - eps * ((fake_tag ? 1.0 : 0.0) - (1.0 - kappa)));
}

double learn_b_update(double b, double eps, double beta, double target) {
  return std::max(0.0, b + eps * (beta - target));
}

LearnResult learn_wm(const LearnConfig& cfg, const WmModel& m, const UserMix& mix, double delta, std::uint64_t seed,
                     std::uint64_t replication) {
  if (cfg.budget < 1) throw std::invalid_argument("budget must be at least 1");
  m.validate();
  mix.validate();
  require_warned(mix);
  Rng rng = make_rng(seed, replication);
  const double target = target_delta(m, mix, delta, cfg.iqos);
  const double kappa = 1.0 - m.real.alpha_y / m.real.alpha_x + cfg.kappa_offset;
  std::vector<int> kinds;
  DeathModel deaths = wm_death_model(mix, &kinds);

  LearnResult res;
  double w = cfg.w0, b = cfg.b0;
  PopulationState s = PopulationState::initial(0, cfg.seed_copies);
  MechanismDesign cur;
  cur.kind = WmKind::learned;
  auto push_trace = [&](long long k) { res.trace.push_back({k, w, b, s.beta()}); };
  push_trace(0);
  for (long long k = 1; k <= cfg.budget; ++k) {
    if (s.extinct) {
      res.extinct = true;
      break;
    }
    // Embedded chain: equal rates across tags, kind chosen by its share.
    auto probs = death_probabilities(s, deaths);
    double u = uniform01(rng), acc = 0.0;
    std::size_t pick = probs.size() - 1;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      acc += probs[i].prob;
      if (u < acc) {
        pick = i;
        break;
      }
    }
    PopType parent = probs[pick].type;
    int user = kinds[static_cast<std::size_t>(probs[pick].kind)];
    bool fake_in = parent == PopType::x;
    double eps = cfg.step_c * std::pow(static_cast<double>(k), -cfg.step_p);
    double coin = k == 1 ? cfg.eta0 : cfg.coin_c * std::pow(static_cast<double>(k - 1), -cfg.coin_p);
    coin = std::min(coin, 1.0);

    bool special = false;
    double omega = 0.0;
    if (user == ws_user) {
      bool head = bernoulli(rng, coin);
      if (head && !fake_in) {
        special = true;
        omega = w + m.gamma;
      } else {
        cur.w = w;
        cur.b = b;
        omega = warning_value(WmKind::learned, s.beta(), cur, m, mix);
      }
    }
    ReadOutcome r = read_copy(user, fake_in, omega, m.real, m, rng);
    s = step_embedded(s, to_offspring(parent, r));
    double beta_after = s.beta();
    if (special) w = learn_w_update(w, eps, r.fake_tag, kappa);
    b = learn_b_update(b, eps, beta_after, target);
    res.epochs = k;
    if (cfg.trace_every > 0 && k % cfg.trace_every == 0) push_trace(k);
  }
  if (res.trace.back().k != res.epochs) push_trace(res.epochs);
  res.w = w;
  res.b = b;
  MechanismDesign learned;
  learned.kind = WmKind::learned;
  learned.w = w;
  learned.b = b;
  learned.delta_target = target;
  evaluate_design(learned, m, mix);
  res.learned_iqos = learned.iqos;
  return res;
}

WmModel smart_model() {
  WmModel m;
  m.m_f = 28;
  m.fake = {0.08, 0.85, 0.6375};
  m.real = {0.05, 0.3, 0.09};
  m.gamma = 0.1;
  m.eta_a = 0.55;
  m.rho = 0.5;
  return m;
}

UserMix smart_mix(double mua) { return UserMix{0.0, 0.0, 1.0 - mua, mua}; }

WmModel naive_model() {
  WmModel m;
  m.m_f = 30;
  m.fake = {0.52, 0.3, 0.225};
  m.real = {0.4, 0.12, 0.09};
  m.gamma = 0.1;
  m.eta_a = 0.55;
  m.rho = 0.9;
  return m;
}

UserMix naive_mix(double mua) { return UserMix{1.0 - 0.65 - mua, 0.15, 0.5, mua}; }

}  // namespace bpsim
