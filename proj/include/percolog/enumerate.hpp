#pragma once
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "percolog/configuration.hpp"
#include "percolog/lattice.hpp"

namespace percolog {

using EventFn = std::function<bool(const Configuration&)>;

// Exact probability as a dyadic rational: count / 2^nsites. No floating
// accumulation anywhere; value() is the only conversion.
struct ExactProbability {
  uint64_t count = 0;
  int nsites = 0;
  double value() const { return double(count) * std::pow(2.0, -nsites); }
  uint64_t total() const { return 1ull << nsites; }
};

// Walk all 2^nsites colourings of a lattice with at most 24 sites (p must be
// 1/2) and count each event. Deterministic, exact.
std::vector<ExactProbability> exact_enumerate(const TriLattice& lat,
                                              const std::vector<EventFn>& events);

struct OracleCheck {
  std::string name;
  double exact = 0;     // enumeration value
  double mc = 0;        // Monte Carlo frequency
  uint64_t hits = 0;    // MC tally
  uint64_t samples = 0;
  double z = 0;         // (mc - exact) / binomial sigma at the exact value
  bool flagged = false; // |z| > 3
};

// Monte Carlo (production sampler at the lattice's own p) against exact
// enumeration values (computed at p = 1/2). Sampling with p != 1/2 is the
// deliberate way to see the z-scores blow up.
std::vector<OracleCheck> compare_mc_exact(const TriLattice& lat,
                                          const std::vector<std::string>& names,
                                          const std::vector<EventFn>& events, uint64_t n_samples,
                                          uint64_t seed);

}  // namespace percolog
