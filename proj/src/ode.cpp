#include "bpsim/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "bpsim/kernels.hpp"

namespace bpsim {

const char* eq_kind_name(EqKind k) {
  switch (k) {
    case EqKind::attractor: return "attractor";
    case EqKind::repeller: return "repeller";
    case EqKind::saddle: return "saddle";
  }
  return "?";
}

const char* lift_kind_name(LiftKind k) { return k == LiftKind::attractor ? "attractor" : "q-attractor"; }

std::vector<double> EquilibriumReport::attractors() const {
  std::vector<double> out;
  for (const auto& e : equilibria)
    if (e.kind == EqKind::attractor) out.push_back(e.beta);
  return out;
}

std::vector<double> EquilibriumReport::roots() const {
  std::vector<double> out;
  for (const auto& e : equilibria) out.push_back(e.beta);
  return out;
}

namespace {

int sgn(double v) { return (v > 0.0) - (v < 0.0); }

EqKind kind_from_signs(double beta, int left, int right) {
  if (beta <= 0.0) return right < 0 ? EqKind::attractor : (right > 0 ? EqKind::repeller : EqKind::saddle);
  if (beta >= 1.0) return left > 0 ? EqKind::attractor : (left < 0 ? EqKind::repeller : EqKind::saddle);
  if (left > 0 && right < 0) return EqKind::attractor;
  if (left < 0 && right > 0) return EqKind::repeller;
  return EqKind::saddle;
}

}  // namespace

EquilibriumReport classify_scalar(const ScalarField& field, const ClassifyOptions& opt) {
  if (opt.grid_points < 100) throw std::invalid_argument("grid_points must be at least 100");
  const auto& g = field.g;
  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(opt.grid_points) + field.kinks.size() * 3 + 2);
  for (int i = 0; i < opt.grid_points; ++i) xs.push_back(static_cast<double>(i) / (opt.grid_points - 1));
  // Kinks are inserted together with close neighbours so that the one-sided
  // signs next to a kink are sampled on the correct side.
  for (double k : field.kinks) {
    if (!(k >= 0.0 && k <= 1.0)) continue;
    xs.push_back(k);
    double eps = 1e-9;
    if (k - eps > 0.0) xs.push_back(k - eps);
    if (k + eps < 1.0) xs.push_back(k + eps);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  std::vector<double> vs(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    vs[i] = g(xs[i]);
    if (!std::isfinite(vs[i])) {
      std::ostringstream os;
      os << "field not finite at beta=" << xs[i];
      throw std::domain_error(os.str());
    }
  }

  EquilibriumReport rep;
  rep.invariant_ok = vs.front() >= 0.0 && vs.back() <= 0.0;

  for (std::size_t i = 0; i + 1 < vs.size(); ++i)
    if (vs[i] == 0.0 && vs[i + 1] == 0.0) throw std::domain_error("degenerate field");

  const std::size_t n = xs.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (vs[i] == 0.0) {
      int left = i > 0 ? sgn(vs[i - 1]) : 0;
      int right = i + 1 < n ? sgn(vs[i + 1]) : 0;
      Equilibrium e;
      e.beta = xs[i];
      e.left_sign = left;
      e.right_sign = right;
      e.kind = kind_from_signs(e.beta, left, right);
      rep.equilibria.push_back(e);
      continue;
    }
    if (i + 1 < n && vs[i + 1] != 0.0 && sgn(vs[i]) != sgn(vs[i + 1])) {
      double lo = xs[i], hi = xs[i + 1];
      double glo = vs[i];
      for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi || hi - lo <= opt.refine_tol * 1e-3) break;
        double gm = g(mid);
        if (gm == 0.0) {
          lo = hi = mid;
          break;
        }
        if (sgn(gm) == sgn(glo)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      double root = std::fabs(g(lo)) <= std::fabs(g(hi)) ? lo : hi;
      if (std::fabs(g(root)) > opt.jump_residual) continue;  // jump across zero
      Equilibrium e;
      e.beta = root;
      e.left_sign = sgn(vs[i]);
      e.right_sign = sgn(vs[i + 1]);
      e.kind = kind_from_signs(root, e.left_sign, e.right_sign);
      rep.equilibria.push_back(e);
    }
  }

  std::sort(rep.equilibria.begin(), rep.equilibria.end(),
            [](const Equilibrium& a, const Equilibrium& b) { return a.beta < b.beta; });
  for (std::size_t i = 0; i < rep.equilibria.size(); ++i) {
    auto& e = rep.equilibria[i];
    if (e.kind == EqKind::attractor) {
      e.basin_lo = i > 0 ? rep.equilibria[i - 1].beta : 0.0;
      e.basin_hi = i + 1 < rep.equilibria.size() ? rep.equilibria[i + 1].beta : 1.0;
    } else {
      e.basin_lo = e.basin_hi = e.beta;
    }
  }
  return rep;
}

std::vector<ScanRoot> dense_sign_scan(const std::function<double(double)>& g, int points) {
  std::vector<double> xs(static_cast<std::size_t>(points));
  std::vector<double> vs(xs.size());
  for (int i = 0; i < points; ++i) {
    xs[static_cast<std::size_t>(i)] = static_cast<double>(i) / (points - 1);
    vs[static_cast<std::size_t>(i)] = g(xs[static_cast<std::size_t>(i)]);
  }
  std::vector<ScanRoot> out;
  const std::size_t n = xs.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (vs[i] == 0.0) {
      int l = i > 0 ? sgn(vs[i - 1]) : 0, r = i + 1 < n ? sgn(vs[i + 1]) : 0;
      out.push_back({xs[i], kind_from_signs(xs[i], l, r)});
    } else if (i + 1 < n && vs[i + 1] != 0.0 && sgn(vs[i]) != sgn(vs[i + 1])) {
      double m = 0.5 * (xs[i] + xs[i + 1]);
      out.push_back({m, kind_from_signs(m, sgn(vs[i]), sgn(vs[i + 1]))});
    }
  }
  return out;
}

EquilibriumReport lift_limits(EquilibriumReport report, const LiftMap& h) {
  report.lifted.clear();
  for (const auto& e : report.equilibria) {
    LiftedPoint p;
    p.beta = e.beta;
    p.h = h(e.beta);
    p.kind = e.kind == EqKind::attractor ? LiftKind::attractor : LiftKind::q_attractor;
    report.lifted.push_back(p);
  }
  LiftedPoint origin;
  origin.h = {0.0, 0.0, 0.0, 0.0};
  origin.kind = LiftKind::q_attractor;
  report.lifted.push_back(origin);
  report.includes_zero_saddle = true;
  return report;
}

double ratio_beta(const Vec4& y) { return y[0] > 0.0 ? y[1] / y[0] : 0.0; }

Vec4 full_rhs(const Vec4& y, const LiftMap& h) {
  Vec4 out{-y[0], -y[1], -y[2], -y[3]};
  if (y[0] > 0.0) {
    Vec4 hv = h(ratio_beta(y));
    for (int i = 0; i < 4; ++i) out[static_cast<std::size_t>(i)] += hv[static_cast<std::size_t>(i)];
  }
  return out;
}

std::vector<double> OdeTrajectory::at(double t) const {
  if (times.empty()) throw std::logic_error("empty ODE trajectory");
  if (t <= times.front()) return values.front();
  if (t >= times.back()) return values.back();
  auto it = std::upper_bound(times.begin(), times.end(), t);
  std::size_t j = static_cast<std::size_t>(it - times.begin());
  std::size_t i = j - 1;
  double w = (t - times[i]) / (times[j] - times[i]);
  std::vector<double> out(values[i].size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = (1.0 - w) * values[i][k] + w * values[j][k];
  return out;
}

namespace {

void check_finite(const std::vector<double>& v, double t) {
  for (double x : v)
    if (!std::isfinite(x)) {
      std::ostringstream os;
      os << "rhs not finite at t=" << t;
      throw std::domain_error(os.str());
    }
}

}  // namespace

OdeTrajectory picard_solve(const OdeRhs& rhs, const std::vector<double>& y0, double T,
                           const PicardOptions& opt) {
  if (opt.sweeps < 1) throw std::invalid_argument("sweeps must be at least 1");
  if (!(T > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (opt.mesh_per_unit < 1 || !(opt.window > 0.0)) throw std::invalid_argument("invalid mesh");
  const std::size_t dim = y0.size();
  const long long steps = std::max<long long>(1, std::llround(std::ceil(T * opt.mesh_per_unit)));
  const double h = T / static_cast<double>(steps);
  const long long per_window = std::max<long long>(1, std::llround(std::ceil(opt.window / h - 1e-9)));

  OdeTrajectory out;
  out.step = h;
  out.times.resize(static_cast<std::size_t>(steps + 1));
  for (long long i = 0; i <= steps; ++i) out.times[static_cast<std::size_t>(i)] = h * static_cast<double>(i);
  out.values.assign(static_cast<std::size_t>(steps + 1), y0);
  out.sweep_changes.assign(static_cast<std::size_t>(opt.sweeps), 0.0);

  std::vector<double> cur, next, f;
  for (long long w0 = 0; w0 < steps; w0 += per_window) {
    long long w1 = std::min(steps, w0 + per_window);
    std::size_t m = static_cast<std::size_t>(w1 - w0 + 1);
    const std::vector<double> start = out.values[static_cast<std::size_t>(w0)];
    // Flattened iterate on this window; the zeroth iterate is constant.
    cur.assign(m * dim, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t k = 0; k < dim; ++k) cur[i * dim + k] = start[k];
    next.assign(m * dim, 0.0);
    f.assign(m * dim, 0.0);
    std::vector<double> yi(dim);
    int done = 0;
    for (int s = 0; s < opt.sweeps; ++s) {
      for (std::size_t i = 0; i < m; ++i) {
        double t = out.times[static_cast<std::size_t>(w0) + i];
        for (std::size_t k = 0; k < dim; ++k) yi[k] = cur[i * dim + k];
        std::vector<double> fi = rhs(yi, t);
        check_finite(fi, t);
        for (std::size_t k = 0; k < dim; ++k) f[i * dim + k] = fi[k];
      }
      for (std::size_t k = 0; k < dim; ++k) next[k] = start[k];
      for (std::size_t i = 1; i < m; ++i)
        for (std::size_t k = 0; k < dim; ++k)
          next[i * dim + k] = next[(i - 1) * dim + k] + 0.5 * h * (f[(i - 1) * dim + k] + f[i * dim + k]);
      double change = kernels::max_abs_diff(next, cur);
      auto& sc = out.sweep_changes[static_cast<std::size_t>(s)];
      sc = std::max(sc, change);
      cur.swap(next);
      done = s + 1;
      if (change <= opt.stop_change) break;
    }
    out.sweeps = std::max(out.sweeps, done);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t k = 0; k < dim; ++k) out.values[static_cast<std::size_t>(w0) + i][k] = cur[i * dim + k];
  }
  return out;
}

OdeTrajectory euler_solve(const OdeRhs& rhs, const std::vector<double>& y0, double T, double dt,
                          int record_every) {
  if (!(dt > 0.0) || !(T > 0.0)) throw std::invalid_argument("invalid Euler step");
  OdeTrajectory out;
  out.step = dt;
  long long steps = std::llround(std::ceil(T / dt));
  double h = T / static_cast<double>(steps);
  std::vector<double> y = y0;
  out.times.push_back(0.0);
  out.values.push_back(y);
  for (long long i = 0; i < steps; ++i) {
    double t = h * static_cast<double>(i);
    std::vector<double> f = rhs(y, t);
    check_finite(f, t);
    for (std::size_t k = 0; k < y.size(); ++k) y[k] += h * f[k];
    if ((i + 1) % record_every == 0 || i + 1 == steps) {
      out.times.push_back(h * static_cast<double>(i + 1));
      out.values.push_back(y);
    }
  }
  return out;
}

double harmonic(long long n) {
  if (n <= 0) return 0.0;
  if (n > 100000) {
    double x = static_cast<double>(n);
    return std::log(x) + std::numbers::egamma + 1.0 / (2 * x) - 1.0 / (12 * x * x) + 1.0 / (120 * x * x * x * x);
  }
  // Summed from the small end for accuracy.
  double s = 0.0;
  for (long long k = n; k >= 1; --k) s += 1.0 / static_cast<double>(k);
  return s;
}

long long eta_of_t(double t) {
  if (t < 1.0) return 0;
  if (t < 10.0) {
    long long n = 0;
    double s = 0.0;
    while (s + 1.0 / static_cast<double>(n + 1) <= t) {
      ++n;
      s += 1.0 / static_cast<double>(n);
    }
    return n;
  }
  long long n = static_cast<long long>(std::floor(std::exp(t - std::numbers::egamma)));
  n = std::max<long long>(n, 1);
  while (harmonic(n) > t) --n;
  while (harmonic(n + 1) <= t) ++n;
  return n;
}

Vec4 drift_from_means(double beta, const Means& m) {
  double hpc = beta * (m.xx + m.xy) + (1.0 - beta) * (m.yy + m.yx) - 1.0;
  double htc = beta * (m.xx - 1.0) + (1.0 - beta) * m.yx;
  double hta = beta * m.xx + (1.0 - beta) * m.yx;
  return {hpc, htc, hpc + 1.0, hta};
}

Vec4 autonomous_rhs(const Vec4& y, const MeanModel& model) {
  return full_rhs(y, [&](double b) { return drift_from_means(b, model.limit(b)); });
}

Vec4 nonauto_rhs(const Vec4& y, double t, const MeanModel& model) {
  Vec4 out{-y[0], -y[1], -y[2], -y[3]};
  if (y[0] <= 0.0) return out;
  double eta = static_cast<double>(eta_of_t(t));
  double beta = ratio_beta(y);
  Means m = model.at_state(y[1] * eta, (y[0] - y[1]) * eta, y[3] * eta, (y[2] - y[3]) * eta);
  Vec4 h = drift_from_means(beta, m);
  for (std::size_t i = 0; i < 4; ++i) out[i] += h[i];
  return out;
}

namespace {
double example_one_mean(double total) { return total <= 400.0 ? 3.0 - 0.002 * total : 1.2; }
}  // namespace

MeanModel example_one_model() {
  MeanModel m;
  m.at_state = [](double, double, double ax, double ay) {
    Means r;
    r.xx = example_one_mean(ax + ay);
    return r;
  };
  m.limit = [](double) {
    Means r;
    r.xx = 1.2;
    return r;
  };
  return m;
}

OffspringSampler example_one_sampler() {
  return [](const PopulationState& s, PopType, int, Rng& rng) {
    OffspringSample o;
    o.parent = PopType::x;
    o.own = poisson(rng, example_one_mean(static_cast<double>(s.ax + s.ay)));
    return o;
  };
}

double finite_time_gap(const std::vector<RatioVector>& sa, const OdeTrajectory& ode, long long n_start,
                       double T) {
  if (n_start < 1 || static_cast<std::size_t>(n_start) >= sa.size())
    throw std::invalid_argument("trajectory too short for the requested window");
  const double t0 = harmonic(n_start);
  double tk = t0;
  double gap = 0.0;
  long long k = n_start;
  bool covered = false;
  for (;; ++k) {
    if (k > n_start) tk += 1.0 / static_cast<double>(k);
    if (tk - t0 > T + 1e-12) {
      covered = true;
      break;
    }
    if (static_cast<std::size_t>(k) >= sa.size()) break;
    std::vector<double> y = ode.at(tk - t0);
    auto a = sa[static_cast<std::size_t>(k)].as_array();
    double d = kernels::max_abs_diff(std::span<const double>(a.data(), 4), std::span<const double>(y.data(), 4));
    gap = std::max(gap, d);
  }
  if (!covered) throw std::invalid_argument("trajectory too short for the requested window");
  return gap;
}

const char* hover_name(HoverResult h) {
  switch (h) {
    case HoverResult::converged_attractor: return "converged_attractor";
    case HoverResult::converged_saddle: return "converged_saddle";
    case HoverResult::hovering: return "hovering";
    case HoverResult::undecided: return "undecided";
  }
  return "?";
}

HoverResult hover_classify(const std::vector<double>& betas, const std::vector<HoverTarget>& targets,
                           const HoverOptions& opt) {
  if (betas.empty()) throw std::invalid_argument("empty sequence");
  if (!(opt.delta > 0.0 && opt.delta < opt.delta1)) throw std::invalid_argument("need 0 < delta < delta1");
  if (!(opt.tail_fraction > 0.0 && opt.tail_fraction < 1.0)) throw std::invalid_argument("tail_fraction in (0,1)");
  std::size_t n = betas.size();
  std::size_t len = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(opt.tail_fraction * n)));
  std::size_t start = n - std::min(n, len);

  for (const auto& tgt : targets) {
    bool all = true;
    for (std::size_t i = start; i < n && all; ++i) all = std::fabs(betas[i] - tgt.value) <= opt.delta;
    if (all) return tgt.saddle ? HoverResult::converged_saddle : HoverResult::converged_attractor;
  }
  auto dist = [&](double b) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& tgt : targets) d = std::min(d, std::fabs(b - tgt.value));
    return d;
  };
  int entries = 0, exits = 0;
  bool in_inner = false, in_outer = true;
  for (std::size_t i = start; i < n; ++i) {
    double d = dist(betas[i]);
    bool inner = d < opt.delta;
    bool outer = d <= opt.delta1;
    if (i == start) {
      in_inner = inner;
      in_outer = outer;
      continue;
    }
    if (inner && !in_inner) ++entries;
    if (!outer && in_outer) ++exits;
    in_inner = inner;
    in_outer = outer;
  }
  if (entries >= 2 && exits >= 2) return HoverResult::hovering;
  return HoverResult::undecided;
}

}  // namespace bpsim
