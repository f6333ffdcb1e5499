#pragma once
#include <cstdint>
#include <vector>

#include "percolog/configuration.hpp"
#include "percolog/connectivity.hpp"
#include "percolog/lattice.hpp"

namespace percolog {

// Arm colour pattern, cyclic for bulk annuli, linear along the semicircle for
// boundary events. true = open arm, false = closed arm. Multiplicity is
// "at least": extra crossing clusters may be interleaved.
struct ArmPattern {
  std::vector<bool> colours;
};

inline ArmPattern pattern_open() { return {{true}}; }
inline ArmPattern pattern_open_closed() { return {{true, false}}; }
inline ArmPattern pattern_open_closed_open() { return {{true, false, true}}; }
inline ArmPattern pattern_four_alternating() { return {{true, false, true, false}}; }

// s1 and s2 lie in distinct open clusters of the B-restricted colouring, each
// cluster touching the outer boundary of B (sites of B with a neighbour
// outside B). The closed circuit separating them exists automatically on this
// lattice, so only the two-cluster condition is checked.
bool separation_event(const Configuration& c, const RegionMask& b, Site s1, Site s2);

// as above with the rim precomputed (rim = mask_boundary(b)) and a reusable
// arena (reset internally, so it may arrive in any state)
bool separation_event(const Configuration& c, const RegionMask& b, const std::vector<Site>& rim,
                      Site s1, Site s2, UnionFind& uf);

// Polychromatic arm event across an annulus mask (info.kind == Annulus).
// A crossing cluster is a same-colour cluster inside the annulus touching both
// the inner rim (neighbour of the inner hole) and the outer rim (neighbour of
// the outside). The pattern must occur, in cyclic order, in the sequence of
// crossing-cluster colours read at their first contact sites on the inner
// circle (angular order).
bool annulus_arm_event(const Configuration& c, const RegionMask& annulus, const ArmPattern& pat);

// Boundary arm event in the upper half-plane: crossing clusters of the
// half-annulus r0 < d(site, x) <= r, read in angular order along the
// semicircle; the pattern must occur as a subsequence in either direction.
bool boundary_arm_event(const Configuration& c, const TriLattice& lat, Site x, double r,
                        const ArmPattern& pat, double r0 = 2.0);

// Both-colour components of a whole lattice with per-cluster extent records.
// Roots returned by find() are colour-pure (open sites never join closed).
struct LatticeComponents {
  const TriLattice* lat = nullptr;
  const Configuration* cfg = nullptr;
  UnionFind uf;
  std::vector<double> minx, maxx, maxy;  // indexed by root site

  void build(const Configuration& c, const TriLattice& l);

  // cluster of root reaches Euclidean distance >= r from point q
  // (exact: bounding-box screen plus a site scan in the rare ambiguous band)
  bool reaches(int root, Point q, double r) const;
};

struct MeetingPoint {
  Site y;                 // boundary site where the two clusters meet (left site of the pair)
  int32_t open_cluster;   // component keys (stable within the LatticeComponents build)
  int32_t closed_cluster;
};

// Boundary sites y inside the open interval (a,b) where an open crossing
// cluster and a closed crossing cluster, each reaching distance r from y, sit
// on adjacent boundary sites. A run of adjacent pairs bounded by the same two
// clusters is one meeting point, reported at its leftmost site.
std::vector<MeetingPoint> two_arm_meeting_points(const Configuration& c, const TriLattice& lat,
                                                 double a, double b, double r);

// same, reusing prebuilt components
std::vector<MeetingPoint> two_arm_meeting_points(const LatticeComponents& comps, double a,
                                                 double b, double r);

}  // namespace percolog
