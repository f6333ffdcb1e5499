#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace percolog {

using Site = int32_t;

inline constexpr double kRowHeight = 0.86602540378443864676;  // sqrt(3)/2

enum class Geometry { BulkBox, HalfPlaneStrip };

struct Point {
  double x = 0.0, y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
double dist(Point a, Point b);

struct LatticeSpec {
  Geometry geometry = Geometry::BulkBox;
  int L = 0;          // sites per side, >= 4
  double p = 0.5;     // open-site probability, 0 < p < 1
};

// Triangular-lattice patch in axial coordinates. Site (i,j) is embedded at
// (i + j/2, j*sqrt(3)/2) and has six neighbours:
//   (i+1,j) (i-1,j) (i,j+1) (i,j-1) (i+1,j-1) (i-1,j+1)
// BulkBox L:        0 <= i,j < L   (60-degree rhombus patch, side L)
// HalfPlaneStrip L: 0 <= i < L, 0 <= j < max(2, L/2); row j = 0 lies on the
//                   real line and is flagged as the boundary.
// All sites outside the patch simply do not exist (free boundary).
struct TriLattice {
  Geometry geom = Geometry::BulkBox;
  int W = 0, H = 0;
  double p = 0.5;

  explicit TriLattice(const LatticeSpec& spec);

  int nsites() const { return W * H; }
  Site at(int i, int j) const { return Site(j) * W + i; }
  int col(Site s) const { return int(s) % W; }
  int row(Site s) const { return int(s) / W; }
  bool inside(int i, int j) const { return i >= 0 && i < W && j >= 0 && j < H; }

  Point pos(Site s) const {
    int j = row(s);
    return {double(col(s)) + 0.5 * j, j * kRowHeight};
  }

  bool boundary_site(Site s) const {
    return geom == Geometry::HalfPlaneStrip && row(s) == 0;
  }

  // fills out[] with the existing neighbours of s, returns their count (<= 6)
  int neighbors(Site s, Site out[6]) const;

  // nearest site to z in the Euclidean embedding; exact ties resolve to the
  // lowest site index
  Site site_at(Point z) const;

  // site on the boundary row nearest to x (HalfPlaneStrip only)
  Site boundary_site_at(double x) const;
};

// Set of sites of a lattice, with provenance of the defining shape.
struct ShapeInfo {
  enum Kind { Any, Disk, Annulus, HalfPlaneMinusNotch, Interval, Complement, Full } kind = Any;
  Point c{};
  double r = 0.0, R = 0.0;  // Disk: radius r; Annulus: r < d <= R; Notch: r
  double a = 0.0, b = 0.0;  // Interval: open interval (a,b) on the boundary row
};

struct RegionMask {
  const TriLattice* lat = nullptr;
  std::vector<uint8_t> in;   // size nsites(), 1 if member
  std::vector<Site> sites;   // members in ascending order
  ShapeInfo info;

  bool contains(Site s) const { return in[size_t(s)] != 0; }
  size_t size() const { return sites.size(); }
};

// d(site, c) <= r
RegionMask disk_mask(const TriLattice& lat, Point c, double r);
// r < d(site, c) <= R  (disjoint from disk_mask(c,r); union is disk_mask(c,R))
RegionMask annulus_mask(const TriLattice& lat, Point c, double r, double R);
// everything except d(site, c) <= rho; c must lie on the boundary row
// (HalfPlaneStrip only)
RegionMask halfplane_minus_notch_mask(const TriLattice& lat, Point c, double rho);
// boundary-row sites with a < x < b (open interval; HalfPlaneStrip only)
RegionMask interval_mask(const TriLattice& lat, double a, double b);
RegionMask complement_mask(const RegionMask& m);
RegionMask full_mask(const TriLattice& lat);

// sites of B with at least one existing neighbour outside B
std::vector<Site> mask_boundary(const RegionMask& b);

void validate(const LatticeSpec& spec);  // throws std::invalid_argument

}  // namespace percolog
