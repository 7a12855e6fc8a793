#pragma once
// Undirected friendship graphs from edge lists, post propagation on them,
// and estimation of the expected-forwards curve from propagation runs.

#include <cstdint>
#include <istream>
#include <string>
#include <unordered_map>
#include <vector>

#include "bpsim/market.hpp"
#include "bpsim/rng.hpp"

namespace bpsim {

struct Graph {
  std::vector<long long> ids;                  // dense index -> original id
  std::unordered_map<long long, int> index;    // original id -> dense index
  std::vector<std::vector<int>> adj;           // sorted, symmetric, no self-loops
  long long edges = 0;

  std::size_t nodes() const { return ids.size(); }
  double mean_degree() const;
  int node(long long id) const;  // throws std::out_of_range on unknown ids
};

// Edge-list text: one "u v" pair per line, '#' lines ignored, self-loops and
// duplicates dropped. Throws std::runtime_error naming the line on bad input.
Graph parse_graph(std::istream& in);
Graph parse_graph_file(const std::string& path);
// Canonical edge list: each edge once as "u v" with u < v, sorted.
std::string emit_graph(const Graph& g);

struct PropagationEvent {
  long long epoch;
  long long reader;    // original node id
  long long forwards;  // new recipients of this read
  long long total;     // nodes that have received the post
  long long current;   // unread copies after the read
};

struct PropagationResult {
  std::vector<PropagationEvent> events;
  long long reach = 0;
  long long peak_current = 0;
};

PropagationResult propagate_on_graph(const Graph& g, const std::vector<long long>& seeds, double rho, Rng& rng);

struct TefBin {
  double lo = 0, hi = 0;
  double forwards = 0;
  long long transitions = 0;
  double mean() const { return transitions > 0 ? forwards / static_cast<double>(transitions) : 0.0; }
};

struct TefFit {
  TefParams params;  // rho is set to 1: the fit describes rho * TeF
  bool degenerate = false;
  double sse = 0;
  std::vector<TefBin> bins;
  long long viral_runs = 0;
  double peak_current_mean = 0;  // over viral runs
  double reach_mean = 0;
};

// Two-segment continuous least squares on (x, y) with the breakpoint chosen
// from the candidate list.
TefFit fit_two_segment(const std::vector<double>& x, const std::vector<double>& y,
                       const std::vector<double>& breaks);

struct TefEstimateConfig {
  double rho = 1.0;
  double bin_width = 1000;
  long long runs = 100;
  long long viral_threshold = 1000;  // reach needed for a run to count
  std::uint64_t seed = 1;
  int jobs = 1;
};

// Throws std::runtime_error("insufficient data") without viral runs.
TefFit estimate_tef(const Graph& g, const TefEstimateConfig& cfg);

}  // namespace bpsim
