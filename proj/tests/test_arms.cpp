#include <algorithm>
#include <vector>

#include "doctest.h"
#include "percolog/arms.hpp"
#include "percolog/configuration.hpp"
#include "percolog/lattice.hpp"

using namespace percolog;

namespace {

Configuration all_closed(const TriLattice& lat) {
  Configuration c;
  c.resize(lat.nsites());
  return c;
}

}  // namespace

TEST_CASE("separation_event needs two distinct rim-touching clusters") {
  const TriLattice lat(LatticeSpec{Geometry::BulkBox, 13, 0.5});
  const Point ctr = lat.pos(lat.at(6, 6));
  const RegionMask b = disk_mask(lat, ctr, 3.2);
  Configuration c = all_closed(lat);
  for (int j = 0; j < 13; ++j) c.set(lat.at(5, j), true);
  for (int j = 0; j < 13; ++j) c.set(lat.at(8, j), true);
  const Site s1 = lat.at(5, 6), s2 = lat.at(8, 6);
  CHECK(separation_event(c, b, s1, s2));
  // arena overload agrees
  const std::vector<Site> rim = mask_boundary(b);
  UnionFind uf;
  CHECK(separation_event(c, b, rim, s1, s2, uf));
  // join the columns inside the disk -> one cluster -> no separation
  Configuration joined = c;
  for (int i = 5; i <= 8; ++i) joined.set(lat.at(i, 6), true);
  CHECK(!separation_event(joined, b, s1, s2));
  // stubby cluster that never reaches the rim -> no separation
  Configuration stub = all_closed(lat);
  stub.set(s1, true);
  for (int j = 5; j <= 7; ++j) stub.set(lat.at(8, j), true);
  CHECK(!separation_event(stub, b, s1, s2));
}

TEST_CASE("annulus arm event reads cyclic crossing colours") {
  const TriLattice lat(LatticeSpec{Geometry::BulkBox, 17, 0.5});
  const Point ctr = lat.pos(lat.at(8, 8));
  const RegionMask ring = annulus_mask(lat, ctr, 2.0, 6.0);

  // all closed except the full row through the centre: the row splits into
  // left/right open crossings, the closed bulk into top/bottom wedges
  Configuration c = all_closed(lat);
  for (int i = 0; i < 17; ++i) c.set(lat.at(i, 8), true);

  CHECK(annulus_arm_event(c, ring, pattern_open()));
  CHECK(annulus_arm_event(c, ring, pattern_open_closed()));
  CHECK(annulus_arm_event(c, ring, pattern_open_closed_open()));
  CHECK(annulus_arm_event(c, ring, pattern_four_alternating()));
  // cyclic rotation of the same pattern
  CHECK(annulus_arm_event(c, ring, ArmPattern{{false, true, false, true}}));
  // six alternating arms do not exist here
  CHECK(!annulus_arm_event(c, ring, ArmPattern{{true, false, true, false, true, false}}));

  Configuration open_all = all_closed(lat);
  open_all.flip_all();
  CHECK(annulus_arm_event(open_all, ring, pattern_open()));
  CHECK(!annulus_arm_event(open_all, ring, pattern_open_closed()));
  Configuration closed_all = all_closed(lat);
  CHECK(!annulus_arm_event(closed_all, ring, pattern_open()));
  CHECK(annulus_arm_event(closed_all, ring, ArmPattern{{false}}));
}

TEST_CASE("boundary arm event along the semicircle") {
  const TriLattice lat(LatticeSpec{Geometry::HalfPlaneStrip, 32, 0.5});
  const Site x = lat.at(16, 0);

  // two open rays fanning out of x, everything else closed:
  // crossing colours along the arc are C O C O C
  Configuration c = all_closed(lat);
  for (int j = 0; j < 8; ++j) c.set(lat.at(16 - j, j), true);
  for (int j = 0; j < 8; ++j) c.set(lat.at(16, j), true);

  CHECK(boundary_arm_event(c, lat, x, 6.0, pattern_open()));
  CHECK(boundary_arm_event(c, lat, x, 6.0, pattern_open_closed_open()));
  CHECK(boundary_arm_event(c, lat, x, 6.0, pattern_four_alternating()));
  CHECK(boundary_arm_event(c, lat, x, 6.0, ArmPattern{{false, true, false, true, false}}));
  CHECK(!boundary_arm_event(c, lat, x, 6.0,
                            ArmPattern{{false, true, false, true, false, true}}));

  // one open ray: C O C
  Configuration one = all_closed(lat);
  for (int j = 0; j < 8; ++j) one.set(lat.at(16, j), true);
  CHECK(boundary_arm_event(one, lat, x, 6.0, pattern_open()));
  CHECK(boundary_arm_event(one, lat, x, 6.0, pattern_open_closed()));
  CHECK(!boundary_arm_event(one, lat, x, 6.0, pattern_open_closed_open()));
}

TEST_CASE("meeting points: plateau collapses to its leftmost site") {
  const TriLattice lat(LatticeSpec{Geometry::HalfPlaneStrip, 32, 0.5});
  // open arch: columns 10 and 12 bridged at row 6; closed column 11 enclosed
  Configuration c = all_closed(lat);
  for (int j = 0; j <= 6; ++j) c.set(lat.at(10, j), true);
  for (int j = 0; j <= 6; ++j) c.set(lat.at(12, j), true);
  c.set(lat.at(11, 6), true);
  // column 11 rows 0..5 stay closed (enclosed cluster), everything else closed too

  auto run = [&](double a, double b, double r) {
    auto v = two_arm_meeting_points(c, lat, a, b, r);
    std::sort(v.begin(), v.end(),
              [](const MeetingPoint& p, const MeetingPoint& q) { return p.y < q.y; });
    return v;
  };

  // sea|arch at 9, arch|enclosed-column plateau (10,11)+(11,12) at 10, arch|sea at 12
  auto v3 = run(5.0, 20.0, 3.0);
  REQUIRE(v3.size() == 3);
  CHECK(v3[0].y == lat.at(9, 0));
  CHECK(v3[1].y == lat.at(10, 0));
  CHECK(v3[2].y == lat.at(12, 0));
  CHECK(v3[0].open_cluster == v3[1].open_cluster);   // same arch everywhere
  CHECK(v3[1].open_cluster == v3[2].open_cluster);
  CHECK(v3[0].closed_cluster == v3[2].closed_cluster);  // the sea on both flanks
  CHECK(v3[0].closed_cluster != v3[1].closed_cluster);  // enclosed column is its own

  // enclosed column only reaches ~5.57 from its meeting: raising r drops it
  // (5.99 stays clear of the arch corner sitting at distance exactly 6)
  auto v2 = run(5.0, 20.0, 5.99);
  REQUIRE(v2.size() == 2);
  CHECK(v2[0].y == lat.at(9, 0));
  CHECK(v2[1].y == lat.at(12, 0));

  CHECK(run(15.0, 20.0, 3.0).empty());
}

TEST_CASE("lattice components track cluster reach") {
  const TriLattice lat(LatticeSpec{Geometry::HalfPlaneStrip, 32, 0.5});
  Configuration c = all_closed(lat);
  for (int j = 0; j <= 6; ++j) c.set(lat.at(10, j), true);
  for (int j = 0; j <= 6; ++j) c.set(lat.at(12, j), true);
  c.set(lat.at(11, 6), true);

  LatticeComponents comps;
  comps.build(c, lat);
  const int arch = comps.uf.find(lat.at(10, 0));
  CHECK(arch == comps.uf.find(lat.at(12, 3)));
  const Point q = lat.pos(lat.at(10, 0));
  CHECK(comps.reaches(arch, q, 4.99));
  // enclosed closed column: top site (11,5) sits at distance ~5.0 from (11,0)
  const int col = comps.uf.find(lat.at(11, 2));
  CHECK(col != comps.uf.find(lat.at(0, 0)));  // not the sea
  const Point q11 = lat.pos(lat.at(11, 0));
  CHECK(comps.reaches(col, q11, 4.99));
  CHECK(!comps.reaches(col, q11, 5.01));
}
