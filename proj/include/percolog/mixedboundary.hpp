#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "percolog/arms.hpp"
#include "percolog/configuration.hpp"
#include "percolog/lattice.hpp"
#include "percolog/stats.hpp"

namespace percolog {

// Taxonomy of the mixed boundary four-point event. x1 and x2 anchor two-arm
// insertions on the boundary row; (x3, x4) is the landing interval. Classes
// are decided in a fixed order, so every sample gets exactly one:
//   1. no closed crossing from either anchor neighbourhood into the interval
//      -> Disconnected
//   2. a crossing from exactly one anchor -> None
//   3. crossings from both anchors in two distinct closed clusters
//      -> ThreeAlternatingArms (an open crossing separates them)
//   4. crossings only through one shared closed cluster: two paths from the
//      two neighbourhoods into the interval that share no site except
//      possibly landing sites -> SameClusterLanding (carries a landing site);
//      all routes forced through a single cut site -> Pinched
enum class MixedEventClass {
  Disconnected,
  Pinched,
  ThreeAlternatingArms,
  SameClusterLanding,
  None,
};
std::string to_string(MixedEventClass cls);

// Boundary four-point geometry on a half-plane strip. Anchors must keep
// their radius-2 neighbourhoods disjoint from each other and from the
// landing interval; both anchors on one side of the interval and anchors
// straddling it are both legal.
struct MixedGeometry {
  const TriLattice* lat = nullptr;
  int x1 = 0, x2 = 0, x3 = 0, x4 = 0;
  double r_macro = 0.0;            // landing-detector qualification radius
  std::vector<Site> nbhd1, nbhd2;  // sites within distance 2 of each anchor
  std::vector<Site> interval;      // boundary sites strictly inside (x3, x4)
};
// r_macro = 0 selects the default: half the smaller anchor-to-interval gap.
MixedGeometry mixed_geometry(const TriLattice& lat, int x1, int x2, int x3, int x4,
                             double r_macro = 0.0);

struct MixedResult {
  MixedEventClass cls = MixedEventClass::None;
  Site y = -1;           // leftmost landing site, SameClusterLanding only
  int32_t cluster = -1;  // root of the shared closed cluster when one exists
};

MixedResult classify_mixed_event(const Configuration& c, const MixedGeometry& g);
// as above, reusing a component arena across samples
MixedResult classify_mixed_event(const Configuration& c, const MixedGeometry& g,
                                 LatticeComponents& comps);

// flip every colour inside the region, leave the rest untouched; involution
Configuration color_switch(const Configuration& c, const RegionMask& region);

// keys: disconnected pinched three_arms same_cluster none (enum order);
// tallies of one batch sum to the batch size
std::vector<std::string> mixed_keys();
EventCounts estimate_mixed(const MixedGeometry& g, uint64_t n_samples, uint64_t seed,
                           int batches);

// Histogram of boundary two-arm landing points. Every qualifying meeting
// point of the landing cluster is tallied (a cluster footprint usually has
// one per edge), binned at the midpoint of its open/closed site pair.
struct LandingHistogram {
  std::vector<double> edges;    // bins + 1 edges spanning [x3, x4]
  std::vector<uint64_t> count;  // landing-point tallies per bin
  std::vector<double> density;  // per unit length; integrates to 1
  std::vector<double> sigma;    // per-bin binomial error, same normalisation
  uint64_t landings = 0;        // total landing points histogrammed
  uint64_t qualifying = 0;      // samples classified SameClusterLanding
  uint64_t samples = 0;
};
// Empirical density of the landing site over (x3, x4). Requires at least
// 1000 qualifying samples, else throws.
LandingHistogram landing_density(const MixedGeometry& g, uint64_t n_samples, uint64_t seed,
                                 int bins);

// |x1-y|^{-1} |x2-y|^{-1}, the predicted (unnormalised) landing shape
double log_term_integrand(double x1, double x2, double y);
// closed form of its integral over (x3, x4), requires x1 < x2 < x3 < x4:
//   |x1-x2|^{-1} log[ (x4-x2)(x3-x1) / ((x3-x2)(x4-x1)) ]
double log_term_integral(double x1, double x2, double x3, double x4);
// adaptive-Simpson cross-check of the same integral
double log_term_quadrature(double x1, double x2, double x3, double x4, double tol = 1e-12);

}  // namespace percolog
