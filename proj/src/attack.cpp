#include "bpsim/attack.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bpsim {

void AttackLimits::validate() const {
  if (e_xx < 0 || e_xy < 0 || e_yy < 0 || e_yx < 0) throw std::invalid_argument("attack means must be nonnegative");
  if (!(e_xy > 0)) throw std::invalid_argument("e_xy must be positive");
}

ScalarField build_gbeta(const AttackLimits& e) {
  ScalarField f;
  const double mt = e.m_tilde(), mi = e.m_inf(), eyx = e.e_yx;
  f.g = [=](double b) {
    if (b <= 0.0 || b >= 1.0) return 0.0;
    return -eyx + b * mt - b * b * mi;
  };
  f.kinks = {0.0, 1.0};
  return f;
}

Vec4 attack_h(const AttackLimits& e, double b) {
  const double below1 = b < 1.0 ? 1.0 : 0.0;
  const double above0 = b > 0.0 ? 1.0 : 0.0;
  double hpc = b * e.e_xx + (1.0 - b) * e.e_yy - 1.0;
  double htc = b * (e.e_xx + e.e_xy * below1 - 1.0) - (1.0 - b) * e.e_yx * above0;
  double hta = b * (e.e_xx + e.e_xy * below1) - (1.0 - b) * e.e_yx * above0;
  return {hpc, htc, hpc + 1.0, hta};
}

bool in_set_E(const AttackLimits& e) {
  return e.e_yx > 0.0 || (e.e_yx == 0.0 && e.e_xx + e.e_xy < e.e_yy);
}

namespace {

std::optional<double> interior_root(const AttackLimits& e) {
  const double a = -e.m_inf(), b = e.m_tilde(), c = -e.e_yx;
  std::vector<double> roots;
  if (a == 0.0) {
    if (b != 0.0) roots.push_back(-c / b);
  } else {
    double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0) {
      double sq = std::sqrt(disc);
      // Numerically stable pair.
      double q = -0.5 * (b + (b >= 0 ? sq : -sq));
      if (q != 0.0) {
        roots.push_back(q / a);
        roots.push_back(c / q);
      } else {
        roots.push_back(0.0);
      }
    }
  }
  std::vector<double> inside;
  for (double r : roots)
    if (r > 0.0 && r < 1.0) inside.push_back(r);
  std::sort(inside.begin(), inside.end());
  inside.erase(std::unique(inside.begin(), inside.end()), inside.end());
  if (inside.size() == 1) return inside.front();
  if (inside.size() > 1) throw std::logic_error("attack field has two interior roots");
  return std::nullopt;
}

}  // namespace

AttackAnalysis classify_regime_and_limits(const AttackLimits& e, const ClassifyOptions& opt) {
  e.validate();
  AttackAnalysis out;
  out.in_E = in_set_E(e);
  ScalarField f = build_gbeta(e);
  EquilibriumReport scalar = classify_scalar(f, opt);
  if (out.in_E) {
    out.beta_r = interior_root(e);
    if (!out.beta_r) throw std::logic_error("no interior repeller although parameters are in the two-limit regime");
  }
  // Cross-check the closed form against the sign scan.
  std::vector<double> att = scalar.attractors();
  std::vector<double> expect = out.in_E ? std::vector<double>{0.0, 1.0} : std::vector<double>{1.0};
  bool ok = att.size() == expect.size();
  for (std::size_t i = 0; ok && i < att.size(); ++i) ok = std::fabs(att[i] - expect[i]) < 1e-12;
  if (ok && out.beta_r) {
    bool found = false;
    for (const auto& q : scalar.equilibria)
      if (q.kind == EqKind::repeller && std::fabs(q.beta - *out.beta_r) < 1e-8) found = true;
    ok = found;
  }
  if (!ok) throw std::logic_error("attack regime disagrees with the scalar field classification");
  if (out.beta_r) {
    // Report the closed-form root, which is exact up to rounding.
    for (auto& q : scalar.equilibria)
      if (q.kind == EqKind::repeller && std::fabs(q.beta - *out.beta_r) < 1e-8) q.beta = *out.beta_r;
  }
  out.report = lift_limits(scalar, [&](double b) { return attack_h(e, b); });
  return out;
}

OffspringSample attack_offspring_from_draws(const PopulationState& s, PopType parent, long long own_draw,
                                            long long attack_draw) {
  if (own_draw < 0 || attack_draw < 0) throw std::invalid_argument("invalid offspring sample");
  long long other = parent == PopType::x ? s.cy : s.cx;
  long long captured = std::min(attack_draw, other);
  OffspringSample o;
  o.parent = parent;
  o.own = own_draw + captured;
  o.cross = -captured;
  return o;
}

OffspringSample sample_attack_offspring(const PopulationState& s, PopType parent,
                                        const AttackSamplerConfig& cfg, Rng& rng) {
  const auto& e = cfg.limits;
  double extra = 0.0;
  long long sc = s.current();
  if (cfg.transient_c != 0.0 && sc > 0) extra = cfg.transient_c / std::pow(static_cast<double>(sc), cfg.transient_alpha);
  double own_mean = std::max(0.0, (parent == PopType::x ? e.e_xx : e.e_yy) + extra);
  double att_mean = std::max(0.0, (parent == PopType::x ? e.e_xy : e.e_yx) + extra);
  long long floor_n = std::min<long long>(cfg.own_floor, static_cast<long long>(std::floor(own_mean)));
  floor_n = std::max<long long>(floor_n, 0);
  long long own = floor_n + poisson(rng, own_mean - static_cast<double>(floor_n));
  long long att = poisson(rng, att_mean);
  return attack_offspring_from_draws(s, parent, own, att);
}

OffspringSampler make_attack_sampler(const AttackSamplerConfig& cfg) {
  return [cfg](const PopulationState& s, PopType parent, int, Rng& rng) {
    return sample_attack_offspring(s, parent, cfg, rng);
  };
}

}  // namespace bpsim
