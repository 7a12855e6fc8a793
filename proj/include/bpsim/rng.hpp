#pragma once
// Per-replication random streams. Replication r of a run seeded with s
// draws from a generator seeded with s ^ r (scrambled), so results do not
// depend on how replications are scheduled across threads.

#include <cstdint>
#include <random>

namespace bpsim {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);
Rng make_rng(std::uint64_t seed, std::uint64_t replication = 0);

// Uniform in [0,1).
double uniform01(Rng& rng);
bool bernoulli(Rng& rng, double p);
long long poisson(Rng& rng, double mean);
long long binomial(Rng& rng, long long trials, double p);
// Geometric on {0,1,2,...} with the given mean (mean 0 gives 0).
long long geometric_with_mean(Rng& rng, double mean);
double exponential(Rng& rng, double rate);

}  // namespace bpsim
