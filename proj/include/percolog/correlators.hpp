#pragma once
#include <array>
#include <cstdint>
#include <vector>

#include "percolog/configuration.hpp"
#include "percolog/connectivity.hpp"
#include "percolog/fits.hpp"
#include "percolog/lattice.hpp"
#include "percolog/stats.hpp"

namespace percolog {

// Moebius-invariant cross-ratios. The bulk form is the modulus of
// (z1-z2)(z3-z4) / ((z1-z4)(z3-z2)) computed in the complex plane; the
// boundary form is the real combination (x4-x2)(x3-x1)/((x3-x2)(x4-x1)) for
// ordered points x1 < x2 < x3 < x4 on the real line.
double cross_ratio_bulk(Point z1, Point z2, Point z3, Point z4);
double cross_ratio_boundary(double x1, double x2, double x3, double x4);

// |z-z3|^{-5/4} |z-z4|^{-5/4} |z3-z4|^{25/24}
double kernel_F_bulk(Point z, Point z3, Point z4);
// (x3-x)^{-2} (x4-x)^{-2} (x4-x3)^{4/3}, requires x3 < x4 and x distinct
double kernel_F_boundary(double x, double x3, double x4);

// Four probe sites with embedded positions and derived invariants.
struct QuadGeometry {
  bool boundary = false;
  std::array<Site, 4> s{};
  std::array<Point, 4> z{};
  double r12 = 0.0, r34 = 0.0;  // |z1-z2|, |z3-z4|
  double x = 0.0;               // cross-ratio (bulk modulus / boundary form)
};

// Distinct sites anywhere in the lattice.
QuadGeometry bulk_quad(const TriLattice& lat, std::array<Site, 4> sites);
// Boundary-row sites with strictly increasing columns (HalfPlaneStrip only).
QuadGeometry boundary_quad(const TriLattice& lat, std::array<Site, 4> sites);

// ---- per-configuration cores (reusable arenas, shared with the runner) ----

struct FourPointFlags {
  PartitionClass cls = PartitionClass::Other;
  bool conn12 = false, conn34 = false;
};
FourPointFlags eval_four_point(const Configuration& c, const TriLattice& lat,
                               const QuadGeometry& q, UnionFind& uf);

// Pair probes sharing a left anchor on the middle row; partner k sits sep[k]
// columns to the right. in_window marks separations inside [4, W/8].
struct TwoPointProbes {
  Site anchor = 0;
  std::vector<Site> partner;
  std::vector<int> sep;
  std::vector<bool> in_window;
};
TwoPointProbes two_point_probes(const TriLattice& lat, const std::vector<int>& seps);
// hits[k] += 1 for each partner openly connected to the anchor
void eval_two_point(const Configuration& c, const TriLattice& lat, const TwoPointProbes& pr,
                    UnionFind& uf, uint64_t* hits);

// ---- single-threaded sampling fronts ----
// All fronts shard [0, n_samples) into `batches` contiguous index ranges of
// the (seed, index) counter stream; batches >= 30 and n_samples >= batches.

struct TwoPointRow {
  double r = 0.0;
  bool in_window = false;
  Estimate est;
};
std::vector<TwoPointRow> estimate_two_point(const TriLattice& lat, const std::vector<int>& seps,
                                            uint64_t n_samples, uint64_t seed, int batches);
// weighted power-law fit over the in-window rows; value ~ r^slope, slope ~ -5/24
FitResult two_point_fit(const std::vector<TwoPointRow>& rows);

// keys: all_four p12_34 p13_24 p14_23 other conn12 conn34
EventCounts estimate_four_point(const TriLattice& lat, const QuadGeometry& q, uint64_t n_samples,
                                uint64_t seed, int batches);
// G-hat = P(joint) - P(conn12) P(conn34) with joint = all_four + p12_34,
// jackknifed over batches
Estimate g_from_counts(const EventCounts& ec);

// Direct G estimator; independent_pairs draws the two pairs from separate
// configurations (indices 2k and 2k+1), where G = 0 exactly.
Estimate estimate_G(const TriLattice& lat, const QuadGeometry& q, uint64_t n_samples,
                    uint64_t seed, int batches, bool independent_pairs = false);

// ---- crossing machinery ----

// open left-to-right crossing of the full rhombus (column 0 to column W-1)
bool eval_rhombus_crossing(const Configuration& c, const TriLattice& lat, UnionFind& uf);
Estimate crossing_rhombus(const TriLattice& lat, uint64_t n_samples, uint64_t seed, int batches);

// Axis-aligned Euclidean rectangle of the given aspect = width/height carved
// out of the lattice embedding, `rows` lattice rows tall, centred. left/right
// hold the per-row extreme sites (the crossing electrodes).
struct RectangleRegion {
  RegionMask mask;
  std::vector<Site> left, right;
  double x0 = 0.0;  // left edge of the rectangle in embedding coordinates
  double width = 0.0, height = 0.0, aspect = 0.0;
};
RectangleRegion rectangle_region(const TriLattice& lat, double aspect, int rows);
bool eval_rectangle_crossing(const Configuration& c, const RectangleRegion& rect, UnionFind& uf);
Estimate crossing_rectangle(const TriLattice& lat, const RectangleRegion& rect,
                            uint64_t n_samples, uint64_t seed, int batches);

// Half-plane crossing between boundary intervals (a1,a2) and (a3,a4), with a
// nested ladder of boundary notches (radius rho, centre cx) removed. group[0]
// holds the sites outside the largest notch; later groups peel inward so one
// incremental union pass per configuration answers every notch radius.
struct NotchLadder {
  const TriLattice* lat = nullptr;
  double a1 = 0, a2 = 0, a3 = 0, a4 = 0;
  Point c{};
  std::vector<double> rho;               // strictly increasing
  std::vector<std::vector<Site>> group;  // rho.size() + 1 groups, outermost first
  std::vector<Site> src, dst;            // electrode sites on the boundary row
};
NotchLadder notch_ladder(const TriLattice& lat, double a1, double a2, double a3, double a4,
                         double cx, std::vector<double> rhos);
// bit j (j < K): crossing with the notch of radius rho[j] removed; bit K:
// crossing of the intact half-plane. A larger notch deletes more sites, so
// the events nest: bit j set implies bit j' set for every j' < j, and bit 0
// implies bit K.
uint32_t eval_notch_crossing(const Configuration& c, const NotchLadder& nl, UnionFind& uf);

struct NotchReport {
  Estimate full;
  std::vector<double> rho;
  std::vector<Estimate> with_notch;  // per rho
  std::vector<Estimate> diff;        // full - with_notch, paired jackknife
  uint64_t violations = 0;           // per-sample monotonicity failures (must be 0)
  FitResult diff_fit;                // power law of diff vs rho, slope ~ +2
};
NotchReport estimate_notch_sensitivity(const TriLattice& lat, const NotchLadder& nl,
                                       uint64_t n_samples, uint64_t seed, int batches);

}  // namespace percolog
