#pragma once
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "percolog/configuration.hpp"
#include "percolog/connectivity.hpp"
#include "percolog/fits.hpp"
#include "percolog/lattice.hpp"
#include "percolog/stats.hpp"

namespace percolog {

// Dyadic ladder of disks B_0 .. B_N around the midpoint of the probe pair
// (z1, z2), with radius[n] = 2^n |z1-z2|. B_0 is the exclusion core; the
// measured scales are n = 1..N. Site s carries stage[s] = smallest n with
// dist(s, center) <= radius[n], or N+1 when s lies outside B_N. On a
// half-plane lattice the disks clip at the boundary row by construction.
struct ScaleLadder {
  const TriLattice* lat = nullptr;
  std::array<Site, 4> s{};  // z1 z2 z3 z4
  Point center{};
  double s12 = 0.0;
  int N = 0;
  std::vector<double> radius;              // index 0..N
  std::vector<uint8_t> stage;              // per site
  std::vector<std::vector<Site>> shell;    // stage k sites, k = 0..N
  std::vector<Site> outside;               // stage N+1
  std::vector<Site> disk_sites;            // stages 0..N, ascending
  std::vector<std::vector<Site>> rim_in;   // [m], m = 0..N-1: sites of B_m next to its outside
  std::vector<std::vector<Site>> rim_out;  // [n], n = 1..N: sites outside B_n next to it
};

// Tabulate a ladder from explicit radii (ascending; radii[0] is the core).
// Requires z1, z2 inside the core and z3, z4 outside the last disk.
ScaleLadder make_ladder(const TriLattice& lat, std::array<Site, 4> z, Point center,
                        std::vector<double> radii);

// Production rule: center = midpoint(z1, z2), radius[n] = 2^n |z1-z2|, and N
// the largest n whose disk both fits inside the lattice hull (bottom edge
// exempt on a half-plane) and keeps z3, z4 strictly outside. Requires
// |z1-z2| >= 4 and N >= 3.
ScaleLadder build_scales(const TriLattice& lat, std::array<Site, 4> z);

// Key layout for a ladder with N scales: "joint", "residual", then per scale
// n = 1..N (suffix n):
//   bucket{n}  scale assignment of the joint connection (bucket1 swallows the
//              core; n >= 2 means first z1-z2 connection appears in B_n)
//   a{n} = A_n and F34_n            (conditioning for the coupled estimate)
//   b{n} = a{n} and hook_n          (hook_n: z3-z4 connected only through B_n)
//   c{n} = F34_n                    (conditioning for the baseline estimate)
//   d{n} = c{n} and hook_n
//   e{n} = F12_{n-1}                (both probes reach the rim of B_{n-1})
//   f{n} = e{n} and F34_n           (factorization check; disjoint supports)
//   h{n} = A_n and conn within B_n^c of z3-z4 (bucket{n} = h{n} + b{n}, n >= 2)
// where A_n = {z1-z2 first connect within B_n}, F34_n = {z3 and z4 each reach
// the rim of B_n from outside}.
std::vector<std::string> multiscale_keys(int N);

struct MultiscaleArena {
  UnionFind uf_disk, uf_comp;
  std::vector<int32_t> roots;
  std::vector<uint8_t> conn_in, f12, f34, conn_comp;
};

// One configuration -> tallies laid out per multiscale_keys(ladder.N).
void eval_multiscale(const Configuration& c, const ScaleLadder& lad, MultiscaleArena& ar,
                     uint64_t* t);

// Single-threaded sampling front over the (seed, index) stream.
EventCounts estimate_multiscale(const ScaleLadder& lad, uint64_t n_samples, uint64_t seed,
                                int batches);

struct GnRow {
  int n = 0;
  double radius = 0.0;
  uint64_t cond_first = 0, cond_reach = 0;  // tallies of a{n} and c{n}
  bool defined = false;                     // both conditioning tallies >= 100
  Estimate g;                               // b/a - d/c, jackknifed
};
// Per-scale coupling; undefined rows carry tallies but no estimate.
GnRow estimate_gn(const EventCounts& ec, const ScaleLadder& lad, int n);

struct LogSumFit {
  std::vector<double> S, S_sigma;  // cumulative sums over n = 1..prefix
  FitResult fit;                   // S_N against N, weighted by S_sigma
  double slope_sigma = 0.0;        // leave-one-batch jackknife of the slope
};
// Cumulative log-divergence diagnostics over the first `prefix` scales (all
// of which must be defined); requires prefix >= 3.
LogSumFit partial_log_sum(const EventCounts& ec, const ScaleLadder& lad, int prefix);

struct MultiscaleReport {
  std::vector<GnRow> g;               // n = 1..N
  int prefix = 0;                     // longest all-defined initial run
  LogSumFit logsum;                   // filled when prefix >= 3
  std::vector<Estimate> factor_gap;   // f/n - (e/n)(c/n) per scale, ~0
  uint64_t joint = 0;
  bool telescoping_exact = false;     // sum of buckets + residual == joint
};
MultiscaleReport multiscale_report(const EventCounts& ec, const ScaleLadder& lad);

}  // namespace percolog
