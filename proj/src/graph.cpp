#include "bpsim/graph.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace bpsim {

double Graph::mean_degree() const {
  return ids.empty() ? 0.0 : 2.0 * static_cast<double>(edges) / static_cast<double>(ids.size());
}

int Graph::node(long long id) const {
  auto it = index.find(id);
  if (it == index.end()) throw std::out_of_range("unknown node id " + std::to_string(id));
  return it->second;
}

Graph parse_graph(std::istream& in) {
  Graph g;
  std::string line;
  long long lineno = 0;
  auto intern = [&](long long id) {
    auto [it, inserted] = g.index.emplace(id, static_cast<int>(g.ids.size()));
    if (inserted) {
      g.ids.push_back(id);
      g.adj.emplace_back();
    }
    return it->second;
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    long long u = 0, v = 0;
    std::string rest;
    if (!(ls >> u >> v) || (ls >> rest))
      throw std::runtime_error("malformed edge at line " + std::to_string(lineno));
    int a = intern(u), b = intern(v);
    if (a == b) continue;
    g.adj[static_cast<std::size_t>(a)].push_back(b);
    g.adj[static_cast<std::size_t>(b)].push_back(a);
  }
  g.edges = 0;
  for (auto& nb : g.adj) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    g.edges += static_cast<long long>(nb.size());
  }
  g.edges /= 2;
  return g;
}

Graph parse_graph_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open graph file " + path);
  return parse_graph(f);
}

std::string emit_graph(const Graph& g) {
  std::vector<std::pair<long long, long long>> list;
  list.reserve(static_cast<std::size_t>(g.edges));
  for (std::size_t a = 0; a < g.adj.size(); ++a)
    for (int b : g.adj[a]) {
      long long u = g.ids[a], v = g.ids[static_cast<std::size_t>(b)];
      if (u < v) list.emplace_back(u, v);
    }
  std::sort(list.begin(), list.end());
  std::ostringstream os;
  for (auto [u, v] : list) os << u << ' ' << v << '\n';
  return os.str();
}

PropagationResult propagate_on_graph(const Graph& g, const std::vector<long long>& seeds, double rho, Rng& rng) {
  if (seeds.empty()) throw std::invalid_argument("seed list is empty");
  if (rho < 0 || rho > 1) throw std::invalid_argument("rho must lie in [0,1]");
  std::vector<char> has(g.nodes(), 0);
  std::vector<int> unread;
  for (long long s : seeds) {
    int v = g.node(s);
    if (has[static_cast<std::size_t>(v)]) throw std::invalid_argument("duplicate seed " + std::to_string(s));
    has[static_cast<std::size_t>(v)] = 1;
    unread.push_back(v);
  }
  PropagationResult out;
  long long total = static_cast<long long>(unread.size());
  out.peak_current = total;
  long long epoch = 0;
  while (!unread.empty()) {
    std::size_t pick = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(unread.size()));
    pick = std::min(pick, unread.size() - 1);
    int reader = unread[pick];
    unread[pick] = unread.back();
    unread.pop_back();
    long long fw = 0;
    for (int nb : g.adj[static_cast<std::size_t>(reader)]) {
      if (rho < 1.0 && !bernoulli(rng, rho)) continue;
      if (has[static_cast<std::size_t>(nb)]) continue;
      has[static_cast<std::size_t>(nb)] = 1;
      unread.push_back(nb);
      ++fw;
    }
    total += fw;
    ++epoch;
    long long cur = static_cast<long long>(unread.size());
    out.peak_current = std::max(out.peak_current, cur);
    out.events.push_back({epoch, g.ids[static_cast<std::size_t>(reader)], fw, total, cur});
  }
  out.reach = total;
  return out;
}

TefFit fit_two_segment(const std::vector<double>& x, const std::vector<double>& y,
                       const std::vector<double>& breaks) {
  if (x.size() != y.size()) throw std::invalid_argument("fit inputs differ in length");
  TefFit best;
  best.degenerate = true;
  best.sse = std::numeric_limits<double>::infinity();
  best.params.rho = 1.0;
  if (x.size() < 3) {
    // Too few points for two slopes: report a flat line.
    double s = 0;
    for (double v : y) s += v;
    best.params.m_bar = y.empty() ? 0.0 : s / static_cast<double>(y.size());
    best.params.kappa1 = best.params.kappa2 = 0;
    best.params.a_break = x.empty() ? 0.0 : x.back();
    best.sse = 0;
    return best;
  }
  const Eigen::Index n = static_cast<Eigen::Index>(x.size());
  for (double br : breaks) {
    Eigen::MatrixXd A(n, 3);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double xi = x[static_cast<std::size_t>(i)];
      A(i, 0) = 1.0;
      A(i, 1) = -std::min(xi, br);
      A(i, 2) = -std::max(xi - br, 0.0);
      b(i) = y[static_cast<std::size_t>(i)];
    }
    Eigen::VectorXd coef = A.colPivHouseholderQr().solve(b);
    double sse = (A * coef - b).squaredNorm();
    if (sse < best.sse) {
      best.sse = sse;
      best.params.m_bar = coef(0);
      best.params.kappa1 = coef(1);
      best.params.kappa2 = coef(2);
      best.params.a_break = br;
    }
  }
  const auto& p = best.params;
  best.degenerate = !(p.kappa1 > p.kappa2 && p.kappa2 > 0 && p.m_bar > 0);
  return best;
}

TefFit estimate_tef(const Graph& g, const TefEstimateConfig& cfg) {
  if (cfg.runs < 1) throw std::invalid_argument("runs must be at least 1");
  if (!(cfg.bin_width > 0)) throw std::invalid_argument("bin width must be positive");
  if (g.nodes() == 0) throw std::runtime_error("insufficient data");
  struct RunOut {
    bool viral = false;
    long long reach = 0, peak = 0;
    std::vector<std::pair<long long, long long>> pre_total_and_forwards;
  };
  std::vector<RunOut> outs(static_cast<std::size_t>(cfg.runs));
  auto work = [&](long long r) {
    Rng rng = make_rng(cfg.seed, static_cast<std::uint64_t>(r));
    std::size_t start = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(g.nodes()));
    start = std::min(start, g.nodes() - 1);
    PropagationResult pr = propagate_on_graph(g, {g.ids[start]}, cfg.rho, rng);
    RunOut& o = outs[static_cast<std::size_t>(r)];
    o.reach = pr.reach;
    o.peak = pr.peak_current;
    o.viral = pr.reach >= cfg.viral_threshold;
    if (!o.viral) return;
    long long before = 1;
    o.pre_total_and_forwards.reserve(pr.events.size());
    for (const auto& e : pr.events) {
      o.pre_total_and_forwards.emplace_back(before, e.forwards);
      before = e.total;
    }
  };
  int jobs = std::max(1, cfg.jobs);
  if (jobs == 1) {
    for (long long r = 0; r < cfg.runs; ++r) work(r);
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j)
      pool.emplace_back([&, j] {
        for (long long r = j; r < cfg.runs; r += jobs) work(r);
      });
    for (auto& t : pool) t.join();
  }
  TefFit fit;
  std::vector<TefBin> bins;
  double peak_sum = 0, reach_sum = 0;
  for (const auto& o : outs) {
    if (!o.viral) continue;
    ++fit.viral_runs;
    peak_sum += static_cast<double>(o.peak);
    reach_sum += static_cast<double>(o.reach);
    for (auto [a, f] : o.pre_total_and_forwards) {
      std::size_t k = static_cast<std::size_t>(static_cast<double>(a) / cfg.bin_width);
      if (k >= bins.size()) {
        std::size_t old = bins.size();
        bins.resize(k + 1);
        for (std::size_t i = old; i <= k; ++i) {
          bins[i].lo = static_cast<double>(i) * cfg.bin_width;
          bins[i].hi = static_cast<double>(i + 1) * cfg.bin_width;
        }
      }
      bins[k].forwards += static_cast<double>(f);
      ++bins[k].transitions;
    }
  }
  if (fit.viral_runs == 0) throw std::runtime_error("insufficient data");
  std::vector<double> xs, ys;
  for (const auto& b : bins)
    if (b.transitions > 0) {
      xs.push_back(0.5 * (b.lo + b.hi));
      ys.push_back(b.mean());
    }
  // Candidate breakpoints: interior bin edges.
  std::vector<double> breaks;
  for (std::size_t i = 1; i + 1 < xs.size(); ++i) breaks.push_back(0.5 * (xs[i] + xs[i + 1]));
  TefFit core = fit_two_segment(xs, ys, breaks);
  fit.params = core.params;
  fit.degenerate = core.degenerate;
  fit.sse = core.sse;
  fit.bins = std::move(bins);
  fit.peak_current_mean = peak_sum / static_cast<double>(fit.viral_runs);
  fit.reach_mean = reach_sum / static_cast<double>(fit.viral_runs);
  return fit;
}

}  // namespace bpsim
