#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "percolog/lattice.hpp"

using namespace percolog;

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(validate(LatticeSpec{Geometry::BulkBox, 3, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(validate(LatticeSpec{Geometry::BulkBox, 8, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate(LatticeSpec{Geometry::BulkBox, 8, 1.0}), std::invalid_argument);
  CHECK_NOTHROW(validate(LatticeSpec{Geometry::HalfPlaneStrip, 8, 0.5}));
}

TEST_CASE("box and strip dimensions") {
  const TriLattice box(LatticeSpec{Geometry::BulkBox, 10, 0.5});
  CHECK(box.W == 10);
  CHECK(box.H == 10);
  CHECK(box.nsites() == 100);
  const TriLattice strip(LatticeSpec{Geometry::HalfPlaneStrip, 8, 0.5});
  CHECK(strip.W == 8);
  CHECK(strip.H == 4);
  const TriLattice strip4(LatticeSpec{Geometry::HalfPlaneStrip, 4, 0.5});
  CHECK(strip4.H == 2);  // max(2, L/2)
}

TEST_CASE("index round trips and embedding") {
  const TriLattice lat(LatticeSpec{Geometry::BulkBox, 10, 0.5});
  for (int j = 0; j < lat.H; ++j)
    for (int i = 0; i < lat.W; ++i) {
      const Site s = lat.at(i, j);
      CHECK(lat.col(s) == i);
      CHECK(lat.row(s) == j);
    }
  const Point p = lat.pos(lat.at(2, 3));
  CHECK(p.x == doctest::Approx(3.5));
  CHECK(p.y == doctest::Approx(3.0 * kRowHeight));
  CHECK(dist({0, 0}, {3, 4}) == doctest::Approx(5.0));
}

TEST_CASE("neighbour counts and symmetry") {
  const TriLattice lat(LatticeSpec{Geometry::BulkBox, 6, 0.5});
  Site nb[6];
  CHECK(lat.neighbors(lat.at(3, 3), nb) == 6);
  CHECK(lat.neighbors(lat.at(0, 0), nb) == 2);       // (1,0) and (0,1)
  CHECK(lat.neighbors(lat.at(5, 0), nb) == 3);       // (4,0),(5,1),(4,1)
  CHECK(lat.neighbors(lat.at(0, 5), nb) == 3);
  CHECK(lat.neighbors(lat.at(5, 5), nb) == 2);
  // symmetry: t in nb(s) <=> s in nb(t); all neighbours at unit distance
  for (Site s = 0; s < Site(lat.nsites()); ++s) {
    const int k = lat.neighbors(s, nb);
    for (int q = 0; q < k; ++q) {
      CHECK(dist(lat.pos(s), lat.pos(nb[q])) == doctest::Approx(1.0));
      Site nb2[6];
      const int k2 = lat.neighbors(nb[q], nb2);
      CHECK(std::find(nb2, nb2 + k2, s) != nb2 + k2);
    }
  }
}

TEST_CASE("six-neighbour adjacency is the axial rule") {
  const TriLattice lat(LatticeSpec{Geometry::BulkBox, 8, 0.5});
  Site nb[6];
  const int k = lat.neighbors(lat.at(4, 4), nb);
  REQUIRE(k == 6);
  const std::set<Site> got(nb, nb + 6);
  const std::set<Site> expect = {lat.at(5, 4), lat.at(3, 4), lat.at(4, 5),
                                 lat.at(4, 3), lat.at(5, 3), lat.at(3, 5)};
  CHECK(got == expect);
}

TEST_CASE("site_at inverts pos and breaks ties to the lowest index") {
  const TriLattice lat(LatticeSpec{Geometry::BulkBox, 9, 0.5});
  for (Site s = 0; s < Site(lat.nsites()); ++s) CHECK(lat.site_at(lat.pos(s)) == s);
  // midpoint of (0,0)-(1,0): both at distance 1/2, lowest site index wins
  CHECK(lat.site_at({0.5, 0.0}) == lat.at(0, 0));
  // midpoint of (0,1)-(1,1)
  CHECK(lat.site_at({1.0, kRowHeight}) == lat.at(0, 1));
  // clearly nearest interior site: (3,2) sits at (4.0, 2*kRowHeight)
  CHECK(lat.site_at({3.9, 2.0 * kRowHeight + 0.01}) == lat.at(3, 2));
}

TEST_CASE("boundary sites and boundary_site_at") {
  const TriLattice strip(LatticeSpec{Geometry::HalfPlaneStrip, 16, 0.5});
  CHECK(strip.boundary_site(strip.at(5, 0)));
  CHECK(!strip.boundary_site(strip.at(5, 1)));
  CHECK(strip.boundary_site_at(5.4) == strip.at(5, 0));
  CHECK(strip.boundary_site_at(5.5) == strip.at(5, 0));  // tie -> lower index
  CHECK(strip.boundary_site_at(5.6) == strip.at(6, 0));
  const TriLattice box(LatticeSpec{Geometry::BulkBox, 8, 0.5});
  CHECK(!box.boundary_site(box.at(3, 0)));
}

TEST_CASE("disk and annulus masks partition exactly") {
  const TriLattice lat(LatticeSpec{Geometry::BulkBox, 16, 0.5});
  const Point c = lat.pos(lat.at(8, 8));
  const RegionMask inner = disk_mask(lat, c, 2.5);
  const RegionMask ring = annulus_mask(lat, c, 2.5, 5.0);
  const RegionMask outer = disk_mask(lat, c, 5.0);
  CHECK(inner.size() + ring.size() == outer.size());
  for (Site s = 0; s < Site(lat.nsites()); ++s) {
    CHECK((inner.contains(s) || ring.contains(s)) == outer.contains(s));
    CHECK(!(inner.contains(s) && ring.contains(s)));
    const double d = dist(lat.pos(s), c);
    CHECK(inner.contains(s) == (d <= 2.5));
    CHECK(ring.contains(s) == (d > 2.5 && d <= 5.0));
  }
  CHECK(inner.info.kind == ShapeInfo::Disk);
  CHECK(ring.info.kind == ShapeInfo::Annulus);
  // sites list is ascending and matches the bitmap
  CHECK(std::is_sorted(ring.sites.begin(), ring.sites.end()));
  size_t n_in = 0;
  for (Site s = 0; s < Site(lat.nsites()); ++s) n_in += ring.contains(s);
  CHECK(n_in == ring.size());
}

TEST_CASE("complement and full masks") {
  const TriLattice lat(LatticeSpec{Geometry::BulkBox, 12, 0.5});
  const RegionMask d = disk_mask(lat, lat.pos(lat.at(6, 6)), 3.0);
  const RegionMask comp = complement_mask(d);
  CHECK(d.size() + comp.size() == size_t(lat.nsites()));
  for (Site s = 0; s < Site(lat.nsites()); ++s) CHECK(d.contains(s) != comp.contains(s));
  const RegionMask back = complement_mask(comp);
  CHECK(back.sites == d.sites);
  CHECK(full_mask(lat).size() == size_t(lat.nsites()));
}

TEST_CASE("interval mask is the open interval on the boundary row") {
  const TriLattice strip(LatticeSpec{Geometry::HalfPlaneStrip, 16, 0.5});
  const RegionMask iv = interval_mask(strip, 1.0, 4.0);
  CHECK(iv.size() == 2);  // x = 2 and x = 3, endpoints excluded
  CHECK(iv.contains(strip.at(2, 0)));
  CHECK(iv.contains(strip.at(3, 0)));
  CHECK(!iv.contains(strip.at(1, 0)));
  CHECK(!iv.contains(strip.at(4, 0)));
  CHECK(!iv.contains(strip.at(2, 1)));
  const TriLattice box(LatticeSpec{Geometry::BulkBox, 8, 0.5});
  CHECK_THROWS_AS(interval_mask(box, 1.0, 4.0), std::invalid_argument);
}

TEST_CASE("half-plane minus notch removes the closed disk at the boundary") {
  const TriLattice strip(LatticeSpec{Geometry::HalfPlaneStrip, 32, 0.5});
  const Point c = strip.pos(strip.at(8, 0));
  const RegionMask m = halfplane_minus_notch_mask(strip, c, 2.0);
  CHECK(!m.contains(strip.at(8, 0)));
  CHECK(!m.contains(strip.at(6, 0)));   // d = 2 removed (closed notch)
  CHECK(m.contains(strip.at(5, 0)));    // d = 3
  CHECK(!m.contains(strip.at(8, 2)));   // (9, sqrt3), d = 2
  CHECK(m.contains(strip.at(5, 1)));    // d ~ 2.65
  const RegionMask notch = disk_mask(strip, c, 2.0);
  CHECK(m.size() + notch.size() == size_t(strip.nsites()));
  const TriLattice box(LatticeSpec{Geometry::BulkBox, 8, 0.5});
  CHECK_THROWS_AS(halfplane_minus_notch_mask(box, {4, 0}, 2.0), std::invalid_argument);
}

TEST_CASE("mask_boundary lists exactly the sites with an outside neighbour") {
  const TriLattice lat(LatticeSpec{Geometry::BulkBox, 14, 0.5});
  const RegionMask d = disk_mask(lat, lat.pos(lat.at(7, 7)), 4.0);
  const std::vector<Site> rim = mask_boundary(d);
  const std::set<Site> rimset(rim.begin(), rim.end());
  Site nb[6];
  for (Site s = 0; s < Site(lat.nsites()); ++s) {
    if (!d.contains(s)) {
      CHECK(rimset.count(s) == 0);
      continue;
    }
    bool outside_nb = false;
    const int k = lat.neighbors(s, nb);
    for (int q = 0; q < k; ++q) outside_nb |= !d.contains(nb[q]);
    CHECK(rimset.count(s) == size_t(outside_nb));
  }
}
