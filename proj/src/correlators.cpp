#include "percolog/correlators.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace percolog {

namespace {

std::complex<double> cpx(Point p) { return {p.x, p.y}; }

void require_distinct(Point a, Point b, const char* what) {
  if (a.x == b.x && a.y == b.y) throw std::invalid_argument(what);
}

// shared loop skeleton: sample -> eval -> per-batch tallies
template <class EvalFn>
EventCounts run_batches(const TriLattice& lat, std::vector<std::string> keys, uint64_t n_samples,
                        uint64_t seed, int batches, EvalFn&& eval) {
  check_batching(n_samples, batches);
  EventCounts ec(std::move(keys));
  Configuration c;
  std::vector<uint64_t> t;
  for (int b = 0; b < batches; ++b) {
    const BatchRange br = batch_range(n_samples, batches, b);
    t.assign(ec.keys.size(), 0);
    for (uint64_t idx = br.first; idx < br.first + br.n; ++idx) eval(idx, c, t.data());
    ec.add_batch({seed, br.first, br.n, t});
  }
  return ec;
}

// roots of the open sites of `from`, sorted+deduped into `scratch`
void open_roots(const Configuration& c, const std::vector<Site>& from, UnionFind& uf,
                std::vector<int32_t>& scratch) {
  scratch.clear();
  for (Site s : from)
    if (c.open(s)) scratch.push_back(uf.find(s));
  std::sort(scratch.begin(), scratch.end());
  scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
}

bool any_root_matches(const Configuration& c, const std::vector<Site>& among, UnionFind& uf,
                      const std::vector<int32_t>& roots) {
  for (Site s : among)
    if (c.open(s) && std::binary_search(roots.begin(), roots.end(), uf.find(s))) return true;
  return false;
}

}  // namespace

double cross_ratio_bulk(Point z1, Point z2, Point z3, Point z4) {
  require_distinct(z1, z4, "cross_ratio_bulk: z1 == z4");
  require_distinct(z3, z2, "cross_ratio_bulk: z3 == z2");
  const std::complex<double> num = (cpx(z1) - cpx(z2)) * (cpx(z3) - cpx(z4));
  const std::complex<double> den = (cpx(z1) - cpx(z4)) * (cpx(z3) - cpx(z2));
  return std::abs(num / den);
}

double cross_ratio_boundary(double x1, double x2, double x3, double x4) {
  if (!(x1 < x2 && x2 < x3 && x3 < x4))
    throw std::invalid_argument("cross_ratio_boundary: needs x1 < x2 < x3 < x4");
  return (x4 - x2) * (x3 - x1) / ((x3 - x2) * (x4 - x1));
}

double kernel_F_bulk(Point z, Point z3, Point z4) {
  require_distinct(z, z3, "kernel_F_bulk: z == z3");
  require_distinct(z, z4, "kernel_F_bulk: z == z4");
  require_distinct(z3, z4, "kernel_F_bulk: z3 == z4");
  return std::pow(dist(z, z3), -1.25) * std::pow(dist(z, z4), -1.25) *
         std::pow(dist(z3, z4), 25.0 / 24.0);
}

double kernel_F_boundary(double x, double x3, double x4) {
  if (!(x3 < x4)) throw std::invalid_argument("kernel_F_boundary: needs x3 < x4");
  if (x == x3 || x == x4) throw std::invalid_argument("kernel_F_boundary: coincident points");
  const double d3 = x3 - x, d4 = x4 - x;
  return 1.0 / (d3 * d3 * d4 * d4) * std::pow(x4 - x3, 4.0 / 3.0);
}

QuadGeometry bulk_quad(const TriLattice& lat, std::array<Site, 4> sites) {
  QuadGeometry q;
  q.boundary = false;
  q.s = sites;
  for (int k = 0; k < 4; ++k) {
    if (sites[k] < 0 || sites[k] >= lat.nsites())
      throw std::invalid_argument("bulk_quad: site out of range");
    for (int l = 0; l < k; ++l)
      if (sites[k] == sites[l]) throw std::invalid_argument("bulk_quad: duplicate site");
    q.z[k] = lat.pos(sites[k]);
  }
  q.r12 = dist(q.z[0], q.z[1]);
  q.r34 = dist(q.z[2], q.z[3]);
  q.x = cross_ratio_bulk(q.z[0], q.z[1], q.z[2], q.z[3]);
  return q;
}

QuadGeometry boundary_quad(const TriLattice& lat, std::array<Site, 4> sites) {
  if (lat.geom != Geometry::HalfPlaneStrip)
    throw std::invalid_argument("boundary_quad: needs a half-plane lattice");
  QuadGeometry q;
  q.boundary = true;
  q.s = sites;
  for (int k = 0; k < 4; ++k) {
    if (sites[k] < 0 || sites[k] >= lat.nsites() || !lat.boundary_site(sites[k]))
      throw std::invalid_argument("boundary_quad: sites must sit on the boundary row");
    q.z[k] = lat.pos(sites[k]);
    if (k > 0 && !(q.z[k].x > q.z[k - 1].x))
      throw std::invalid_argument("boundary_quad: sites must be strictly ordered");
  }
  q.r12 = q.z[1].x - q.z[0].x;
  q.r34 = q.z[3].x - q.z[2].x;
  q.x = cross_ratio_boundary(q.z[0].x, q.z[1].x, q.z[2].x, q.z[3].x);
  return q;
}

FourPointFlags eval_four_point(const Configuration& c, const TriLattice& lat,
                               const QuadGeometry& q, UnionFind& uf) {
  const bool p12 = c.open(q.s[0]) && c.open(q.s[1]);
  const bool p34 = c.open(q.s[2]) && c.open(q.s[3]);
  FourPointFlags out;
  if (!p12 && !p34) return out;  // every field stays at its null value
  uf.reset(lat.nsites());
  build_components_full(c, lat, true, uf);
  out.conn12 = p12 && uf.same(q.s[0], q.s[1]);
  out.conn34 = p34 && uf.same(q.s[2], q.s[3]);
  out.cls = partition_from_components(c, uf, q.s);
  return out;
}

TwoPointProbes two_point_probes(const TriLattice& lat, const std::vector<int>& seps) {
  if (seps.empty()) throw std::invalid_argument("two_point_probes: no separations");
  int max_sep = 0;
  for (size_t k = 0; k < seps.size(); ++k) {
    if (seps[k] < 1) throw std::invalid_argument("two_point_probes: separation must be >= 1");
    for (size_t l = 0; l < k; ++l)
      if (seps[k] == seps[l]) throw std::invalid_argument("two_point_probes: duplicate separation");
    max_sep = std::max(max_sep, seps[k]);
  }
  if (max_sep > lat.W - 1) throw std::invalid_argument("two_point_probes: separation exceeds lattice");
  TwoPointProbes pr;
  const int j0 = lat.H / 2;
  const int i0 = (lat.W - 1 - max_sep) / 2;
  pr.anchor = lat.at(i0, j0);
  pr.sep = seps;
  for (int r : seps) {
    pr.partner.push_back(lat.at(i0 + r, j0));
    pr.in_window.push_back(r >= 4 && r <= lat.W / 8);
  }
  return pr;
}

void eval_two_point(const Configuration& c, const TriLattice& lat, const TwoPointProbes& pr,
                    UnionFind& uf, uint64_t* hits) {
  if (!c.open(pr.anchor)) return;
  uf.reset(lat.nsites());
  build_components_full(c, lat, true, uf);
  const int ra = uf.find(pr.anchor);
  for (size_t k = 0; k < pr.partner.size(); ++k)
    if (c.open(pr.partner[k]) && uf.find(pr.partner[k]) == ra) ++hits[k];
}

std::vector<TwoPointRow> estimate_two_point(const TriLattice& lat, const std::vector<int>& seps,
                                            uint64_t n_samples, uint64_t seed, int batches) {
  const TwoPointProbes pr = two_point_probes(lat, seps);
  std::vector<std::string> keys;
  for (int r : pr.sep) keys.push_back("r" + std::to_string(r));
  UnionFind uf;
  const EventCounts ec =
      run_batches(lat, keys, n_samples, seed, batches, [&](uint64_t idx, Configuration& c, uint64_t* t) {
        sample_configuration(lat, seed, idx, c);
        eval_two_point(c, lat, pr, uf, t);
      });
  std::vector<TwoPointRow> rows;
  for (size_t k = 0; k < pr.sep.size(); ++k)
    rows.push_back({double(pr.sep[k]), pr.in_window[k], frequency(ec, ec.keys[k])});
  return rows;
}

FitResult two_point_fit(const std::vector<TwoPointRow>& rows) {
  std::vector<FitPoint> pts;
  for (const TwoPointRow& r : rows)
    if (r.in_window) pts.push_back({r.r, r.est.value, r.est.sigma});
  return fit_power_law(pts);
}

EventCounts estimate_four_point(const TriLattice& lat, const QuadGeometry& q, uint64_t n_samples,
                                uint64_t seed, int batches) {
  const std::vector<std::string> keys = {"all_four", "p12_34", "p13_24", "p14_23",
                                         "other",    "conn12", "conn34"};
  UnionFind uf;
  return run_batches(lat, keys, n_samples, seed, batches,
                     [&](uint64_t idx, Configuration& c, uint64_t* t) {
                       sample_configuration(lat, seed, idx, c);
                       const FourPointFlags f = eval_four_point(c, lat, q, uf);
                       ++t[size_t(f.cls)];  // enum order matches the key order
                       if (f.conn12) ++t[5];
                       if (f.conn34) ++t[6];
                     });
}

Estimate g_from_counts(const EventCounts& ec) {
  const size_t ka = ec.key_index("all_four"), kp = ec.key_index("p12_34");
  const size_t k1 = ec.key_index("conn12"), k2 = ec.key_index("conn34");
  return jackknife(ec, [=](const std::vector<double>& t, double n) {
    return (t[ka] + t[kp]) / n - (t[k1] / n) * (t[k2] / n);
  });
}

Estimate estimate_G(const TriLattice& lat, const QuadGeometry& q, uint64_t n_samples,
                    uint64_t seed, int batches, bool independent_pairs) {
  const std::vector<std::string> keys = {"joint", "conn12", "conn34"};
  UnionFind uf;
  EventCounts ec;
  if (!independent_pairs) {
    ec = run_batches(lat, keys, n_samples, seed, batches,
                     [&](uint64_t idx, Configuration& c, uint64_t* t) {
                       sample_configuration(lat, seed, idx, c);
                       const FourPointFlags f = eval_four_point(c, lat, q, uf);
                       if (f.conn12 && f.conn34) ++t[0];
                       if (f.conn12) ++t[1];
                       if (f.conn34) ++t[2];
                     });
  } else {
    // indices 2k and 2k+1 feed the two pairs; G vanishes identically
    Configuration c2;
    auto pair_conn = [&](const Configuration& c, Site u, Site v) {
      if (!c.open(u) || !c.open(v)) return false;
      uf.reset(lat.nsites());
      build_components_full(c, lat, true, uf);
      return uf.same(u, v);
    };
    ec = run_batches(lat, keys, n_samples, seed, batches,
                     [&](uint64_t idx, Configuration& c, uint64_t* t) {
                       sample_configuration(lat, seed, 2 * idx, c);
                       sample_configuration(lat, seed, 2 * idx + 1, c2);
                       const bool c12 = pair_conn(c, q.s[0], q.s[1]);
                       const bool c34 = pair_conn(c2, q.s[2], q.s[3]);
                       if (c12 && c34) ++t[0];
                       if (c12) ++t[1];
                       if (c34) ++t[2];
                     });
  }
  return jackknife(ec, [](const std::vector<double>& t, double n) {
    return t[0] / n - (t[1] / n) * (t[2] / n);
  });
}

bool eval_rhombus_crossing(const Configuration& c, const TriLattice& lat, UnionFind& uf) {
  uf.reset(lat.nsites());
  build_components_full(c, lat, true, uf);
  std::vector<Site> left, right;
  left.reserve(lat.H);
  right.reserve(lat.H);
  for (int j = 0; j < lat.H; ++j) {
    left.push_back(lat.at(0, j));
    right.push_back(lat.at(lat.W - 1, j));
  }
  std::vector<int32_t> roots;
  open_roots(c, left, uf, roots);
  return any_root_matches(c, right, uf, roots);
}

Estimate crossing_rhombus(const TriLattice& lat, uint64_t n_samples, uint64_t seed, int batches) {
  UnionFind uf;
  const EventCounts ec = run_batches(lat, {"cross"}, n_samples, seed, batches,
                                     [&](uint64_t idx, Configuration& c, uint64_t* t) {
                                       sample_configuration(lat, seed, idx, c);
                                       if (eval_rhombus_crossing(c, lat, uf)) ++t[0];
                                     });
  return frequency(ec, "cross");
}

RectangleRegion rectangle_region(const TriLattice& lat, double aspect, int rows) {
  if (!(aspect > 0.0)) throw std::invalid_argument("rectangle_region: aspect must be positive");
  if (rows < 2 || rows > lat.H) throw std::invalid_argument("rectangle_region: bad row count");
  RectangleRegion rect;
  rect.aspect = aspect;
  rect.height = (rows - 1) * kRowHeight;
  rect.width = aspect * rect.height;
  const int j0 = (lat.H - rows) / 2;
  const double lo = 0.5 * (j0 + rows - 1);                    // top row starts latest
  const double hi = (lat.W - 1) + 0.5 * j0 - rect.width;      // bottom row ends earliest
  if (!(lo <= hi)) throw std::invalid_argument("rectangle_region: rectangle does not fit");
  const double x0 = 0.5 * (lo + hi);
  rect.x0 = x0;
  rect.mask.lat = &lat;
  rect.mask.in.assign(size_t(lat.nsites()), 0);
  for (int j = j0; j < j0 + rows; ++j) {
    const int ilo = int(std::ceil(x0 - 0.5 * j));
    const int ihi = int(std::floor(x0 + rect.width - 0.5 * j));
    if (ilo > ihi) throw std::invalid_argument("rectangle_region: empty row");
    for (int i = ilo; i <= ihi; ++i) {
      const Site s = lat.at(i, j);
      rect.mask.in[size_t(s)] = 1;
      rect.mask.sites.push_back(s);
    }
    rect.left.push_back(lat.at(ilo, j));
    rect.right.push_back(lat.at(ihi, j));
  }
  std::sort(rect.mask.sites.begin(), rect.mask.sites.end());
  return rect;
}

bool eval_rectangle_crossing(const Configuration& c, const RectangleRegion& rect, UnionFind& uf) {
  uf.ensure(rect.mask.lat->nsites());
  uf.reset_sites(rect.mask.sites);
  build_components(c, rect.mask, true, uf);
  std::vector<int32_t> roots;
  open_roots(c, rect.left, uf, roots);
  return any_root_matches(c, rect.right, uf, roots);
}

Estimate crossing_rectangle(const TriLattice& lat, const RectangleRegion& rect,
                            uint64_t n_samples, uint64_t seed, int batches) {
  if (rect.mask.lat != &lat)
    throw std::invalid_argument("crossing_rectangle: region built for a different lattice");
  UnionFind uf;
  const EventCounts ec = run_batches(lat, {"cross"}, n_samples, seed, batches,
                                     [&](uint64_t idx, Configuration& c, uint64_t* t) {
                                       sample_configuration(lat, seed, idx, c);
                                       if (eval_rectangle_crossing(c, rect, uf)) ++t[0];
                                     });
  return frequency(ec, "cross");
}

NotchLadder notch_ladder(const TriLattice& lat, double a1, double a2, double a3, double a4,
                         double cx, std::vector<double> rhos) {
  if (lat.geom != Geometry::HalfPlaneStrip)
    throw std::invalid_argument("notch_ladder: needs a half-plane lattice");
  if (!(a1 < a2 && a2 < a3 && a3 < a4))
    throw std::invalid_argument("notch_ladder: intervals must be disjoint and ordered");
  if (!(a2 < cx && cx < a3))
    throw std::invalid_argument("notch_ladder: notch centre must sit between the intervals");
  for (size_t k = 0; k < rhos.size(); ++k) {
    if (!(rhos[k] > 0.0)) throw std::invalid_argument("notch_ladder: notch radius must be positive");
    if (k && !(rhos[k] > rhos[k - 1]))
      throw std::invalid_argument("notch_ladder: radii must be strictly increasing");
  }
  if (!rhos.empty() && !(rhos.back() < std::min(cx - a2, a3 - cx)))
    throw std::invalid_argument("notch_ladder: notch larger than the gap to the intervals");

  NotchLadder nl;
  nl.lat = &lat;
  nl.a1 = a1;
  nl.a2 = a2;
  nl.a3 = a3;
  nl.a4 = a4;
  nl.c = {cx, 0.0};
  nl.rho = rhos;
  const int K = int(rhos.size());
  nl.group.assign(size_t(K) + 1, {});
  for (Site s = 0; s < Site(lat.nsites()); ++s) {
    const double d = dist(lat.pos(s), nl.c);
    int g = 0;  // outside every notch
    if (K > 0 && d <= rhos.back()) {
      g = K;  // inside the smallest notch unless a larger shell claims it
      for (int k = K - 1; k >= 1; --k)
        if (d > rhos[size_t(k) - 1]) {
          g = K - k;
          break;
        }
    }
    nl.group[size_t(g)].push_back(s);
  }
  for (int i = int(std::floor(a1)) + 1; i < a2; ++i)
    if (i >= 0 && i < lat.W) nl.src.push_back(lat.at(i, 0));
  for (int i = int(std::floor(a3)) + 1; i < a4; ++i)
    if (i >= 0 && i < lat.W) nl.dst.push_back(lat.at(i, 0));
  if (nl.src.empty() || nl.dst.empty())
    throw std::invalid_argument("notch_ladder: an electrode interval holds no site");
  return nl;
}

uint32_t eval_notch_crossing(const Configuration& c, const NotchLadder& nl, UnionFind& uf) {
  const TriLattice& lat = *nl.lat;
  const int K = int(nl.rho.size());
  if (K + 1 > 31) throw std::invalid_argument("eval_notch_crossing: too many notch radii");
  uf.reset(lat.nsites());

  // group_of is implied by membership; sites are added group by group, so an
  // edge is united by whichever endpoint arrives second
  std::vector<int32_t> roots;
  uint32_t bits = 0;
  std::vector<uint8_t> added(size_t(lat.nsites()), 0);
  Site nb[6];
  for (int g = 0; g <= K; ++g) {
    for (Site s : nl.group[size_t(g)]) {
      added[size_t(s)] = 1;
      if (!c.open(s)) continue;
      const int n = lat.neighbors(s, nb);
      for (int k = 0; k < n; ++k)
        if (added[size_t(nb[k])] && c.open(nb[k])) uf.unite(s, nb[k]);
    }
    open_roots(c, nl.src, uf, roots);
    if (any_root_matches(c, nl.dst, uf, roots)) bits |= 1u << (g < K ? K - 1 - g : K);
  }
  return bits;
}

NotchReport estimate_notch_sensitivity(const TriLattice& lat, const NotchLadder& nl,
                                       uint64_t n_samples, uint64_t seed, int batches) {
  const int K = int(nl.rho.size());
  std::vector<std::string> keys = {"full"};
  for (int j = 0; j < K; ++j) keys.push_back("notch" + std::to_string(j));
  keys.push_back("violation");
  UnionFind uf;
  const EventCounts ec = run_batches(
      lat, keys, n_samples, seed, batches, [&](uint64_t idx, Configuration& c, uint64_t* t) {
        sample_configuration(lat, seed, idx, c);
        const uint32_t bits = eval_notch_crossing(c, nl, uf);
        if (bits & (1u << K)) ++t[0];
        for (int j = 0; j < K; ++j)
          if (bits & (1u << j)) ++t[size_t(j) + 1];
        // nesting check: larger-notch crossing must survive every shrink
        bool viol = false;
        for (int j = K - 1; j >= 1; --j)
          if ((bits & (1u << j)) && !(bits & (1u << (j - 1)))) viol = true;
        if (K > 0 && (bits & 1u) && !(bits & (1u << K))) viol = true;
        if (viol) ++t[size_t(K) + 1];
      });

  NotchReport rep;
  rep.full = frequency(ec, "full");
  rep.rho = nl.rho;
  rep.violations = ec.total("violation");
  std::vector<FitPoint> pts;
  for (int j = 0; j < K; ++j) {
    rep.with_notch.push_back(frequency(ec, keys[size_t(j) + 1]));
    const size_t kj = size_t(j) + 1;
    const Estimate d = jackknife(ec, [kj](const std::vector<double>& t, double n) {
      return (t[0] - t[kj]) / n;
    });
    rep.diff.push_back(d);
    if (d.value > 0.0 && d.sigma > 0.0) pts.push_back({nl.rho[size_t(j)], d.value, d.sigma});
  }
  if (pts.size() >= 3) rep.diff_fit = fit_power_law(pts);
  return rep;
}

}  // namespace percolog
