#include "percolog/enumerate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace percolog {

std::vector<ExactProbability> exact_enumerate(const TriLattice& lat,
                                              const std::vector<EventFn>& events) {
  const int n = lat.nsites();
  if (n > 24) throw std::invalid_argument("exact_enumerate: more than 24 sites");
  if (lat.p != 0.5) throw std::invalid_argument("exact_enumerate: requires p = 1/2");
  std::vector<ExactProbability> out(events.size());
  for (auto& e : out) e.nsites = n;
  Configuration c;
  c.resize(n);
  const uint64_t total = 1ull << n;
  for (uint64_t bits = 0; bits < total; ++bits) {
    c.words[0] = bits;
    for (size_t k = 0; k < events.size(); ++k)
      if (events[k](c)) ++out[k].count;
  }
  return out;
}

std::vector<OracleCheck> compare_mc_exact(const TriLattice& lat,
                                          const std::vector<std::string>& names,
                                          const std::vector<EventFn>& events, uint64_t n_samples,
                                          uint64_t seed) {
  if (names.size() != events.size())
    throw std::invalid_argument("compare_mc_exact: names/events size mismatch");
  if (n_samples == 0) throw std::invalid_argument("compare_mc_exact: no samples");

  // enumeration runs at p = 1/2 regardless of the sampling bias
  LatticeSpec half{lat.geom, lat.W, 0.5};
  const TriLattice lat_half(half);
  const std::vector<ExactProbability> exact = exact_enumerate(lat_half, events);

  std::vector<uint64_t> hits(events.size(), 0);
  Configuration c;
  for (uint64_t idx = 0; idx < n_samples; ++idx) {
    sample_configuration(lat, seed, idx, c);
    for (size_t k = 0; k < events.size(); ++k)
      if (events[k](c)) ++hits[k];
  }

  std::vector<OracleCheck> out(events.size());
  for (size_t k = 0; k < events.size(); ++k) {
    OracleCheck& oc = out[k];
    oc.name = names[k];
    oc.exact = exact[k].value();
    oc.hits = hits[k];
    oc.samples = n_samples;
    oc.mc = double(hits[k]) / double(n_samples);
    const double var = oc.exact * (1.0 - oc.exact) / double(n_samples);
    oc.z = var > 0 ? (oc.mc - oc.exact) / std::sqrt(var)
                   : (oc.mc == oc.exact ? 0.0 : std::numeric_limits<double>::infinity());
    oc.flagged = std::abs(oc.z) > 3.0;
  }
  return out;
}

}  // namespace percolog
