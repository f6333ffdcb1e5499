#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "doctest.h"
#include "percolog/multiscale.hpp"

using namespace percolog;

namespace {

// open component of `start` restricted to sites where allowed(s) holds
template <class Pred>
std::vector<uint8_t> flood(const Configuration& c, const TriLattice& lat, Site start,
                           Pred allowed) {
  std::vector<uint8_t> seen(size_t(lat.nsites()), 0);
  if (!allowed(start) || !c.open(start)) return seen;
  std::queue<Site> q;
  seen[size_t(start)] = 1;
  q.push(start);
  Site nb[6];
  while (!q.empty()) {
    const Site s = q.front();
    q.pop();
    const int deg = lat.neighbors(s, nb);
    for (int k = 0; k < deg; ++k) {
      const Site t = nb[k];
      if (seen[size_t(t)] || !allowed(t) || !c.open(t)) continue;
      seen[size_t(t)] = 1;
      q.push(t);
    }
  }
  return seen;
}

bool touches_open(const std::vector<uint8_t>& comp, const Configuration& c,
                  const std::vector<Site>& sites) {
  for (Site s : sites)
    if (comp[size_t(s)] && c.open(s)) return true;
  return false;
}

// reference tally builder: same key layout as eval_multiscale, all events
// recomputed with flood fills
void brute_eval(const Configuration& c, const ScaleLadder& lad, uint64_t* t) {
  const TriLattice& lat = *lad.lat;
  const int N = lad.N;
  const Site s1 = lad.s[0], s2 = lad.s[1], s3 = lad.s[2], s4 = lad.s[3];
  const auto stage_le = [&](int m) {
    return [&, m](Site s) { return int(lad.stage[size_t(s)]) <= m; };
  };
  const auto stage_gt = [&](int m) {
    return [&, m](Site s) { return int(lad.stage[size_t(s)]) > m; };
  };
  const auto any = [](Site) { return true; };

  std::vector<uint8_t> conn_in(size_t(N) + 1, 0), f12(size_t(N), 0), f34(size_t(N) + 1, 0),
      conn_comp(size_t(N) + 1, 0);
  for (int k = 0; k <= N; ++k) {
    const auto comp1 = flood(c, lat, s1, stage_le(k));
    conn_in[size_t(k)] = comp1[size_t(s2)];
    if (k < N) {
      const auto comp2 = flood(c, lat, s2, stage_le(k));
      f12[size_t(k)] = touches_open(comp1, c, lad.rim_in[size_t(k)]) &&
                       touches_open(comp2, c, lad.rim_in[size_t(k)]);
    }
  }
  for (int n = 1; n <= N; ++n) {
    const auto comp3 = flood(c, lat, s3, stage_gt(n));
    const auto comp4 = flood(c, lat, s4, stage_gt(n));
    f34[size_t(n)] = touches_open(comp3, c, lad.rim_out[size_t(n)]) &&
                     touches_open(comp4, c, lad.rim_out[size_t(n)]);
    conn_comp[size_t(n)] = comp3[size_t(s4)];
  }
  const auto full3 = flood(c, lat, s3, any);
  const bool conn_full_34 = full3[size_t(s4)];
  const auto full1 = flood(c, lat, s1, any);
  const bool conn_full_12 = full1[size_t(s2)];

  int first_n = -1;
  for (int k = 0; k <= N; ++k)
    if (conn_in[size_t(k)]) {
      first_n = k;
      break;
    }

  const size_t base = 2;
  if (conn_full_12 && conn_full_34) {
    ++t[0];
    if (!conn_in[size_t(N)])
      ++t[1];
    else if (conn_in[1])
      ++t[base];
    else
      ++t[base + size_t(first_n) - 1];
  }
  for (int n = 1; n <= N; ++n) {
    const size_t i = size_t(n) - 1;
    const bool An = first_n == n;
    const bool hook = conn_full_34 && !conn_comp[size_t(n)];
    if (An && f34[size_t(n)]) {
      ++t[base + size_t(N) + i];
      if (hook) ++t[base + 2 * size_t(N) + i];
    }
    if (f34[size_t(n)]) {
      ++t[base + 3 * size_t(N) + i];
      if (hook) ++t[base + 4 * size_t(N) + i];
    }
    if (f12[size_t(n) - 1]) {
      ++t[base + 5 * size_t(N) + i];
      if (f34[size_t(n)]) ++t[base + 6 * size_t(N) + i];
    }
    if (An && conn_comp[size_t(n)]) ++t[base + 7 * size_t(N) + i];
  }
}

}  // namespace

TEST_CASE("ladder stages, shells and rims are the advertised site sets") {
  const TriLattice lat(LatticeSpec{Geometry::BulkBox, 24, 0.5});
  const Point c = lat.pos(lat.at(12, 12));
  const std::array<Site, 4> z = {lat.at(11, 12), lat.at(13, 12), lat.at(1, 1), lat.at(22, 22)};
  const ScaleLadder lad = make_ladder(lat, z, c, {2.2, 4.4, 7.7});
  REQUIRE(lad.N == 2);

  size_t shell_total = lad.outside.size();
  for (const auto& sh : lad.shell) shell_total += sh.size();
  CHECK(shell_total == size_t(lat.nsites()));
  CHECK(std::is_sorted(lad.disk_sites.begin(), lad.disk_sites.end()));

  for (Site s = 0; s < Site(lat.nsites()); ++s) {
    const double d = dist(lat.pos(s), c);
    int expect = lad.N + 1;
    for (int n = 0; n <= lad.N; ++n)
      if (d <= lad.radius[size_t(n)]) {
        expect = n;
        break;
      }
    CHECK(int(lad.stage[size_t(s)]) == expect);
  }

  Site nb[6];
  for (int m = 0; m < lad.N; ++m) {
    std::vector<Site> expect_in, expect_out;
    for (Site s = 0; s < Site(lat.nsites()); ++s) {
      const int deg = lat.neighbors(s, nb);
      bool nb_outside = false, nb_inside = false;
      for (int k = 0; k < deg; ++k) {
        nb_outside = nb_outside || int(lad.stage[size_t(nb[k])]) > m;
        nb_inside = nb_inside || int(lad.stage[size_t(nb[k])]) <= m;
      }
      if (int(lad.stage[size_t(s)]) <= m && nb_outside) expect_in.push_back(s);
      if (int(lad.stage[size_t(s)]) > m && nb_inside && m >= 1) expect_out.push_back(s);
    }
    CHECK(lad.rim_in[size_t(m)] == expect_in);
    if (m >= 1) CHECK(lad.rim_out[size_t(m)] == expect_out);
  }

  CHECK_THROWS_AS(make_ladder(lat, z, c, {4.4, 2.2}), std::invalid_argument);
  CHECK_THROWS_AS(make_ladder(lat, {z[0], z[0], z[2], z[3]}, c, {2.2, 4.4}),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_ladder(lat, {z[2], z[1], z[0], z[3]}, c, {2.2, 4.4}),
                  std::invalid_argument);  // probe outside the core
  CHECK_THROWS_AS(make_ladder(lat, {z[0], z[1], lat.at(12, 13), z[3]}, c, {2.2, 4.4}),
                  std::invalid_argument);  // distant probe inside a disk
}

TEST_CASE("production ladder rule: frozen geometry, guard, and nesting") {
  const TriLattice lat(LatticeSpec{Geometry::BulkBox, 1024, 0.5});
  // pair of separation 8 on the middle row, distant pair 512 and 576 away
  const std::array<Site, 4> z = {lat.at(590, 512), lat.at(598, 512), lat.at(1106, 512),
                                 lat.at(1170, 512)};
  const ScaleLadder lad = build_scales(lat, z);
  CHECK(lad.N == 5);
  CHECK(lad.s12 == doctest::Approx(8.0));
  CHECK(lad.radius[0] == doctest::Approx(8.0));
  CHECK(lad.radius[1] == doctest::Approx(16.0));
  CHECK(lad.radius[5] == doctest::Approx(256.0));
  for (int n = 0; n <= lad.N; ++n) CHECK_FALSE(lad.shell[size_t(n)].empty());
  // nesting: every site of B_{n-1} lies in B_n by the stage construction
  for (Site s : lad.disk_sites) CHECK(int(lad.stage[size_t(s)]) <= lad.N);

  const TriLattice small(LatticeSpec{Geometry::BulkBox, 64, 0.5});
  CHECK_THROWS_AS(build_scales(small, {small.at(26, 32), small.at(34, 32), small.at(60, 2),
                                       small.at(2, 60)}),
                  std::invalid_argument);  // separation L/8 leaves fewer than 3 scales
  CHECK_THROWS_AS(build_scales(lat, {lat.at(590, 512), lat.at(592, 512), lat.at(1106, 512),
                                     lat.at(1170, 512)}),
                  std::invalid_argument);  // pair separation below 4
}

TEST_CASE("half-plane ladders clip at the boundary row; bulk ones may not") {
  const TriLattice strip(LatticeSpec{Geometry::HalfPlaneStrip, 256, 0.5});
  const std::array<Site, 4> z = {strip.at(100, 0), strip.at(108, 0), strip.at(200, 0),
                                 strip.at(220, 0)};
  const ScaleLadder lad = build_scales(strip, z);
  CHECK(lad.N == 3);
  CHECK(lad.center.y == doctest::Approx(0.0));

  const TriLattice box(LatticeSpec{Geometry::BulkBox, 256, 0.5});
  CHECK_THROWS_AS(build_scales(box, {box.at(100, 0), box.at(108, 0), box.at(200, 0),
                                     box.at(220, 0)}),
                  std::invalid_argument);  // same disks poke below a bulk box
}

TEST_CASE("eval_multiscale matches flood-fill reconstruction on random configurations") {
  const TriLattice lat(LatticeSpec{Geometry::BulkBox, 32, 0.5});
  const Point c{24.0, 16 * kRowHeight};
  const std::array<Site, 4> z = {lat.at(14, 16), lat.at(18, 16), lat.at(2, 2), lat.at(30, 30)};
  const ScaleLadder lad = make_ladder(lat, z, c, {4.2, 8.4, 12.6});
  REQUIRE(lad.N == 2);

  MultiscaleArena ar;
  Configuration cfg;
  const size_t nkeys = multiscale_keys(lad.N).size();
  std::vector<uint64_t> got(nkeys), want(nkeys);
  for (uint64_t idx = 0; idx < 300; ++idx) {
    sample_configuration(lat, 37, idx, cfg);
    std::fill(got.begin(), got.end(), 0);
    std::fill(want.begin(), want.end(), 0);
    eval_multiscale(cfg, lad, ar, got.data());
    brute_eval(cfg, lad, want.data());
    REQUIRE(got == want);
  }
}

TEST_CASE("tiny-strip enumeration: exact tallies, telescoping, and the coupling oracle") {
  const TriLattice lat(LatticeSpec{Geometry::HalfPlaneStrip, 7, 0.5});
  REQUIRE(lat.nsites() == 21);
  const Point c{2.0, 0.0};
  // distant probes chosen non-adjacent so the complement connection can fail
  // while a detour through the disks exists: the hook has positive probability
  const std::array<Site, 4> z = {lat.at(1, 0), lat.at(3, 0), lat.at(6, 0), lat.at(4, 2)};
  const ScaleLadder lad = make_ladder(lat, z, c, {1.05, 2.2, 3.2});
  REQUIRE(lad.N == 2);

  const auto keys = multiscale_keys(lad.N);
  const size_t nk = keys.size();
  std::vector<uint64_t> exact(nk, 0), one(nk), brute(nk);
  MultiscaleArena ar;
  Configuration cfg;
  cfg.resize(lat.nsites());
  for (uint32_t m = 0; m < (1u << 21); ++m) {
    cfg.words[0] = m;
    std::fill(one.begin(), one.end(), 0);
    eval_multiscale(cfg, lad, ar, one.data());
    for (size_t k = 0; k < nk; ++k) exact[k] += one[k];
    if (m % 37 == 0) {  // spot-check against the flood-fill reference
      std::fill(brute.begin(), brute.end(), 0);
      brute_eval(cfg, lad, brute.data());
      REQUIRE(one == brute);
    }
  }

  // key layout: joint residual bucket1 bucket2 a1 a2 b1 b2 c1 c2 d1 d2 ...
  const uint64_t joint = exact[0], residual = exact[1];
  const uint64_t bucket1 = exact[2], bucket2 = exact[3];
  const uint64_t a1 = exact[4], a2 = exact[5], b1 = exact[6], b2 = exact[7];
  const uint64_t c1 = exact[8], c2 = exact[9], d1 = exact[10], d2 = exact[11];
  const uint64_t h1 = exact[16], h2 = exact[17];
  CHECK(joint == bucket1 + bucket2 + residual);  // telescoping, exactly
  CHECK(bucket2 == h2 + b2);                     // hook/complement split at n >= 2
  CHECK(bucket1 >= h1 + b1);                     // bucket 1 also swallows the core
  REQUIRE(a1 > 0);
  REQUIRE(a2 > 0);
  REQUIRE(b1 > 0);  // the oracle is non-trivial: hooks really occur
  REQUIRE(b2 > 0);
  REQUIRE(d1 > 0);
  REQUIRE(d2 > 0);

  const double g1_exact = double(b1) / double(a1) - double(d1) / double(c1);
  const double g2_exact = double(b2) / double(a2) - double(d2) / double(c2);

  const EventCounts ec = estimate_multiscale(lad, 1500000, 29, 50);
  const GnRow r1 = estimate_gn(ec, lad, 1);
  const GnRow r2 = estimate_gn(ec, lad, 2);
  REQUIRE(r1.defined);
  REQUIRE(r2.defined);
  CHECK(r1.radius == doctest::Approx(2.2));
  CHECK(std::abs(r1.g.value - g1_exact) < 3.0 * r1.g.sigma);
  CHECK(std::abs(r2.g.value - g2_exact) < 3.0 * r2.g.sigma);

  const MultiscaleReport rep = multiscale_report(ec, lad);
  CHECK(rep.telescoping_exact);
  CHECK(rep.joint == ec.total("joint"));
  CHECK(rep.prefix == 2);
  CHECK(rep.logsum.fit.npoints == 0);  // too few scales for the cumulative fit
  for (const Estimate& gap : rep.factor_gap) {
    REQUIRE(gap.sigma > 0.0);
    CHECK(std::abs(gap.value) < 4.0 * gap.sigma);  // disjoint supports: independent
  }
}

TEST_CASE("estimate_gn flags thin conditioning instead of faking a value") {
  const TriLattice lat(LatticeSpec{Geometry::BulkBox, 32, 0.5});
  const Point c{24.0, 16 * kRowHeight};
  const std::array<Site, 4> z = {lat.at(14, 16), lat.at(18, 16), lat.at(2, 2), lat.at(30, 30)};
  const ScaleLadder lad = make_ladder(lat, z, c, {4.2, 8.4, 12.6});

  EventCounts ec(multiscale_keys(lad.N));
  std::vector<uint64_t> t(ec.keys.size(), 0);
  t[ec.key_index("a1")] = 40;  // total 80, below the 100-sample floor
  t[ec.key_index("c1")] = 5000;
  t[ec.key_index("a2")] = 400;
  t[ec.key_index("b2")] = 100;
  t[ec.key_index("c2")] = 5000;
  t[ec.key_index("d2")] = 500;
  ec.add_batch({1, 0, 10000, t});
  ec.add_batch({1, 10000, 10000, t});

  const GnRow r1 = estimate_gn(ec, lad, 1);
  CHECK_FALSE(r1.defined);
  CHECK(r1.cond_first == 80);  // tallies still reported
  const GnRow r2 = estimate_gn(ec, lad, 2);
  CHECK(r2.defined);
  CHECK(r2.g.value == doctest::Approx(0.25 - 0.1));
  CHECK_THROWS_AS(estimate_gn(ec, lad, 3), std::invalid_argument);
}

TEST_CASE("partial_log_sum: constant coupling gives an exact line through zero") {
  const TriLattice lat(LatticeSpec{Geometry::BulkBox, 32, 0.5});
  const Point c{24.0, 16 * kRowHeight};
  const std::array<Site, 4> z = {lat.at(14, 16), lat.at(18, 16), lat.at(2, 2), lat.at(30, 30)};
  const ScaleLadder lad = make_ladder(lat, z, c, {3.0, 6.0, 9.0, 12.6});
  REQUIRE(lad.N == 3);

  EventCounts ec(multiscale_keys(3));
  std::vector<uint64_t> t1(ec.keys.size(), 0), t2(ec.keys.size(), 0);
  for (int n = 1; n <= 3; ++n) {
    const std::string sn = std::to_string(n);
    t1[ec.key_index("a" + sn)] = 600;
    t2[ec.key_index("a" + sn)] = 400;
    t1[ec.key_index("b" + sn)] = 200;
    t2[ec.key_index("b" + sn)] = 100;
    t1[ec.key_index("c" + sn)] = 1200;
    t2[ec.key_index("c" + sn)] = 800;
    t1[ec.key_index("d" + sn)] = 120;
    t2[ec.key_index("d" + sn)] = 80;
  }
  ec.add_batch({1, 0, 5000, t1});
  ec.add_batch({1, 5000, 5000, t2});

  const LogSumFit ls = partial_log_sum(ec, lad, 3);
  // totals per scale: b/a = 300/1000, d/c = 200/2000, so g = 0.2 each
  CHECK(ls.S[0] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(ls.S[1] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(ls.S[2] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(ls.fit.slope == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(ls.fit.intercept == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(ls.fit.r2 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(ls.slope_sigma > 0.0);

  CHECK_THROWS_AS(partial_log_sum(ec, lad, 2), std::invalid_argument);
  CHECK_THROWS_AS(partial_log_sum(ec, lad, 4), std::invalid_argument);
}

TEST_CASE("partial_log_sum: vanishing coupling gives zero slope") {
  const TriLattice lat(LatticeSpec{Geometry::BulkBox, 32, 0.5});
  const Point c{24.0, 16 * kRowHeight};
  const std::array<Site, 4> z = {lat.at(14, 16), lat.at(18, 16), lat.at(2, 2), lat.at(30, 30)};
  const ScaleLadder lad = make_ladder(lat, z, c, {3.0, 6.0, 9.0, 12.6});

  EventCounts ec(multiscale_keys(3));
  std::vector<uint64_t> t1(ec.keys.size(), 0), t2(ec.keys.size(), 0);
  for (int n = 1; n <= 3; ++n) {
    const std::string sn = std::to_string(n);
    t1[ec.key_index("a" + sn)] = 300;  // deliberately non-proportional split so
    t2[ec.key_index("a" + sn)] = 200;  // the jackknife spread stays positive
    t1[ec.key_index("b" + sn)] = 90;
    t2[ec.key_index("b" + sn)] = 30;
    t1[ec.key_index("c" + sn)] = 600;
    t2[ec.key_index("c" + sn)] = 400;
    t1[ec.key_index("d" + sn)] = 144;
    t2[ec.key_index("d" + sn)] = 96;
  }
  ec.add_batch({1, 0, 5000, t1});
  ec.add_batch({1, 5000, 5000, t2});

  const LogSumFit ls = partial_log_sum(ec, lad, 3);
  CHECK(std::abs(ls.S[2]) < 1e-12);  // b/a = d/c = 0.24 on totals
  CHECK(std::abs(ls.fit.slope) < 1e-12);
  CHECK(ls.slope_sigma > 0.0);
}

TEST_CASE("doubling every length leaves bucket fractions of the joint event in place") {
  // Raw probabilities shrink with the pair correlators under dilation; the
  // scale-covariant objects are the partition fractions bucket_n / joint.
  const TriLattice latA(LatticeSpec{Geometry::BulkBox, 128, 0.5});
  const std::array<Site, 4> zA = {latA.at(60, 64), latA.at(64, 64), latA.at(102, 64),
                                  latA.at(110, 64)};
  const ScaleLadder ladA = build_scales(latA, zA);
  const TriLattice latB(LatticeSpec{Geometry::BulkBox, 256, 0.5});
  const std::array<Site, 4> zB = {latB.at(120, 128), latB.at(128, 128), latB.at(204, 128),
                                  latB.at(220, 128)};
  const ScaleLadder ladB = build_scales(latB, zB);
  REQUIRE(ladA.N == 3);
  REQUIRE(ladB.N == 3);

  const EventCounts ecA = estimate_multiscale(ladA, 20000, 41, 30);
  const EventCounts ecB = estimate_multiscale(ladB, 20000, 42, 30);
  const auto fraction = [](const EventCounts& ec, const char* key) {
    const size_t kn = ec.key_index(key), kj = ec.key_index("joint");
    return jackknife(ec, [kn, kj](const std::vector<double>& t, double) {
      return t[kj] > 0.0 ? t[kn] / t[kj] : 0.0;
    });
  };
  for (const char* key : {"bucket1", "bucket2", "bucket3"}) {
    const Estimate a = fraction(ecA, key), b = fraction(ecB, key);
    const double sigma = std::sqrt(a.sigma * a.sigma + b.sigma * b.sigma);
    REQUIRE(sigma > 0.0);
    CHECK(std::abs(a.value - b.value) < 3.0 * sigma);
  }
}

TEST_CASE("multiscale sampling is bitwise reproducible") {
  const TriLattice lat(LatticeSpec{Geometry::BulkBox, 32, 0.5});
  const Point c{24.0, 16 * kRowHeight};
  const std::array<Site, 4> z = {lat.at(14, 16), lat.at(18, 16), lat.at(2, 2), lat.at(30, 30)};
  const ScaleLadder lad = make_ladder(lat, z, c, {4.2, 8.4, 12.6});
  const EventCounts ec1 = estimate_multiscale(lad, 5000, 7, 50);
  const EventCounts ec2 = estimate_multiscale(lad, 5000, 7, 50);
  REQUIRE(ec1.batches.size() == ec2.batches.size());
  for (size_t b = 0; b < ec1.batches.size(); ++b)
    CHECK(ec1.batches[b].tallies == ec2.batches[b].tallies);
}
