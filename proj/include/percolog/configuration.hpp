#pragma once
#include <cstdint>
#include <vector>

#include "percolog/lattice.hpp"
#include "percolog/rng.hpp"

namespace percolog {

// One percolation colouring, bit-packed: bit set = open, clear = closed.
// Bits beyond nsites() in the last word are kept zero.
struct Configuration {
  std::vector<uint64_t> words;
  int n = 0;

  void resize(int nsites) {
    n = nsites;
    words.assign((size_t(nsites) + 63) / 64, 0);
  }

  bool open(Site s) const { return (words[size_t(s) >> 6] >> (uint64_t(s) & 63)) & 1; }

  void set(Site s, bool v) {
    const uint64_t bit = 1ull << (uint64_t(s) & 63);
    if (v)
      words[size_t(s) >> 6] |= bit;
    else
      words[size_t(s) >> 6] &= ~bit;
  }

  void mask_tail() {
    if (n % 64 && !words.empty()) words.back() &= (1ull << (n % 64)) - 1;
  }

  // swap colours everywhere
  void flip_all() {
    for (auto& w : words) w = ~w;
    mask_tail();
  }

  // swap colours on the sites of a region
  void flip_region(const RegionMask& m) {
    for (Site s : m.sites) words[size_t(s) >> 6] ^= 1ull << (uint64_t(s) & 63);
  }

  bool operator==(const Configuration& o) const { return n == o.n && words == o.words; }
};

// Deterministic sampling: the bits are a pure function of (lattice spec, seed,
// index). p = 1/2 maps counter words straight into the bit array; other p uses
// one counter draw per site against the threshold.
inline void sample_configuration(const TriLattice& lat, uint64_t seed, uint64_t index,
                                 Configuration& out) {
  out.resize(lat.nsites());
  const CounterRng rng(seed, index);
  if (lat.p == 0.5) {
    for (size_t w = 0; w < out.words.size(); ++w) out.words[w] = rng.word(w);
    out.mask_tail();
  } else {
    constexpr uint64_t kSiteDomain = 1ull << 62;  // keep site draws clear of word draws
    for (Site s = 0; s < Site(lat.nsites()); ++s)
      if (rng.uniform(kSiteDomain + uint64_t(s)) < lat.p) out.set(s, true);
  }
}

}  // namespace percolog
