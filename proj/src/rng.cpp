#include "bpsim/rng.hpp"

#include <algorithm>

namespace bpsim {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng make_rng(std::uint64_t seed, std::uint64_t replication) {
  return Rng(splitmix64(seed ^ replication));
}

double uniform01(Rng& rng) { return std::generate_canonical<double, 53>(rng); }

bool bernoulli(Rng& rng, double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return uniform01(rng) < p;
}

long long poisson(Rng& rng, double mean) {
  if (mean <= 0.0) return 0;
  std::poisson_distribution<long long> d(mean);
  return d(rng);
}

long long binomial(Rng& rng, long long trials, double p) {
  if (trials <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return trials;
  std::binomial_distribution<long long> d(trials, p);
  return d(rng);
}

long long geometric_with_mean(Rng& rng, double mean) {
  if (mean <= 0.0) return 0;
  // P(k) = (1-q) q^k has mean q/(1-q).
  double success = 1.0 / (1.0 + mean);
  std::geometric_distribution<long long> d(std::clamp(success, 1e-12, 1.0));
  return d(rng);
}

double exponential(Rng& rng, double rate) {
  std::exponential_distribution<double> d(rate);
  return d(rng);
}

}  // namespace bpsim
