#include "percolog/arms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace percolog {

bool separation_event(const Configuration& c, const RegionMask& b, const std::vector<Site>& rim,
                      Site s1, Site s2, UnionFind& uf) {
  if (!b.contains(s1) || !b.contains(s2))
    throw std::invalid_argument("separation_event: probe site outside the region");
  if (!c.open(s1) || !c.open(s2) || s1 == s2) return false;
  uf.reset(b.lat->nsites());
  build_components(c, b, true, uf);
  const int r1 = uf.find(s1), r2 = uf.find(s2);
  if (r1 == r2) return false;
  bool t1 = false, t2 = false;
  for (Site s : rim) {
    if (!c.open(s)) continue;
    const int r = uf.find(s);
    if (r == r1) t1 = true;
    else if (r == r2) t2 = true;
    if (t1 && t2) return true;
  }
  return false;
}

bool separation_event(const Configuration& c, const RegionMask& b, Site s1, Site s2) {
  UnionFind uf;
  return separation_event(c, b, mask_boundary(b), s1, s2, uf);
}

namespace {

// one union pass joining same-colour neighbours inside the mask (both colours)
void build_bichromatic(const Configuration& c, const RegionMask& m, UnionFind& uf) {
  const TriLattice& lat = *m.lat;
  const int W = lat.W, H = lat.H;
  for (Site s : m.sites) {
    const bool col = c.open(s);
    const int i = int(s) % W, j = int(s) / W;
    if (i + 1 < W) {
      const Site t = s + 1;
      if (m.contains(t) && c.open(t) == col) uf.unite(s, t);
    }
    if (j + 1 < H) {
      const Site t = s + W;
      if (m.contains(t) && c.open(t) == col) uf.unite(s, t);
      if (i >= 1) {
        const Site t2 = s + W - 1;
        if (m.contains(t2) && c.open(t2) == col) uf.unite(s, t2);
      }
    }
  }
}

// does pat occur as a subsequence of seq read cyclically (any starting offset)?
bool cyclic_subsequence(const std::vector<bool>& seq, const std::vector<bool>& pat) {
  const size_t m = seq.size(), k = pat.size();
  if (k == 0 || m < k) return false;
  for (size_t rot = 0; rot < m; ++rot) {
    size_t need = 0;
    for (size_t step = 0; step < m && need < k; ++step)
      if (seq[(rot + step) % m] == pat[need]) ++need;
    if (need == k) return true;
  }
  return false;
}

bool linear_subsequence(const std::vector<bool>& seq, const std::vector<bool>& pat) {
  size_t need = 0;
  for (size_t i = 0; i < seq.size() && need < pat.size(); ++i)
    if (seq[i] == pat[need]) ++need;
  return need == pat.size();
}

struct RimSite {
  double angle;
  Site s;
};

// crossing-cluster colour sequence in angular order of first contact on the
// inner rim. inner/outer rim membership is passed as site lists.
std::vector<bool> contact_sequence(const Configuration& c, const RegionMask& mask,
                                   std::vector<RimSite> inner, const std::vector<Site>& outer,
                                   UnionFind& uf) {
  build_bichromatic(c, mask, uf);
  std::sort(inner.begin(), inner.end(), [](const RimSite& a, const RimSite& b) {
    return a.angle != b.angle ? a.angle < b.angle : a.s < b.s;
  });
  // roots touching the outer rim, per colour via root's own colour
  std::vector<int32_t> outer_roots;
  outer_roots.reserve(outer.size());
  for (Site s : outer) outer_roots.push_back(uf.find(s));
  std::sort(outer_roots.begin(), outer_roots.end());
  outer_roots.erase(std::unique(outer_roots.begin(), outer_roots.end()), outer_roots.end());

  std::vector<bool> seq;
  std::vector<int32_t> seen;
  for (const RimSite& rs : inner) {
    const int root = uf.find(rs.s);
    if (!std::binary_search(outer_roots.begin(), outer_roots.end(), root)) continue;
    if (std::find(seen.begin(), seen.end(), root) != seen.end()) continue;
    seen.push_back(root);
    seq.push_back(c.open(rs.s));
  }
  return seq;
}

}  // namespace

bool annulus_arm_event(const Configuration& c, const RegionMask& annulus, const ArmPattern& pat) {
  if (annulus.info.kind != ShapeInfo::Annulus)
    throw std::invalid_argument("annulus_arm_event: mask is not an annulus");
  if (pat.colours.empty()) throw std::invalid_argument("annulus_arm_event: empty pattern");
  const TriLattice& lat = *annulus.lat;
  const Point ctr = annulus.info.c;
  const double r = annulus.info.r, R = annulus.info.R;
  const double r2 = r * r, R2 = R * R;

  std::vector<RimSite> inner;
  std::vector<Site> outer;
  Site nb[6];
  for (Site s : annulus.sites) {
    const Point z = lat.pos(s);
    const double dx = z.x - ctr.x, dy = z.y - ctr.y;
    bool is_inner = false, is_outer = false;
    const int n = lat.neighbors(s, nb);
    for (int k = 0; k < n; ++k) {
      const Point w = lat.pos(nb[k]);
      const double ex = w.x - ctr.x, ey = w.y - ctr.y, d2 = ex * ex + ey * ey;
      if (d2 <= r2) is_inner = true;
      else if (d2 > R2) is_outer = true;
    }
    if (is_inner) inner.push_back({std::atan2(dy, dx), s});
    if (is_outer) outer.push_back(s);
  }
  UnionFind uf;
  uf.reset(lat.nsites());
  const std::vector<bool> seq = contact_sequence(c, annulus, std::move(inner), outer, uf);
  return cyclic_subsequence(seq, pat.colours);
}

bool boundary_arm_event(const Configuration& c, const TriLattice& lat, Site x, double r,
                        const ArmPattern& pat, double r0) {
  if (lat.geom != Geometry::HalfPlaneStrip)
    throw std::invalid_argument("boundary_arm_event: needs a half-plane lattice");
  if (!lat.boundary_site(x)) throw std::invalid_argument("boundary_arm_event: x not on boundary");
  if (pat.colours.empty()) throw std::invalid_argument("boundary_arm_event: empty pattern");
  if (!(r > r0 + 1.0)) throw std::invalid_argument("boundary_arm_event: radius too small");
  const Point ctr = lat.pos(x);
  if (ctr.x - r < 0.0 || ctr.x + r > lat.W - 1 || r > (lat.H - 1) * kRowHeight)
    throw std::invalid_argument("boundary_arm_event: radius exceeds lattice margins");

  const RegionMask half = annulus_mask(lat, ctr, r0, r);
  const double r02 = r0 * r0, r2 = r * r;
  std::vector<RimSite> inner;
  std::vector<Site> outer;
  Site nb[6];
  for (Site s : half.sites) {
    const Point z = lat.pos(s);
    const double dx = z.x - ctr.x, dy = z.y - ctr.y;
    bool is_inner = false, is_outer = false;
    const int n = lat.neighbors(s, nb);
    for (int k = 0; k < n; ++k) {
      const Point w = lat.pos(nb[k]);
      const double ex = w.x - ctr.x, ey = w.y - ctr.y, d2 = ex * ex + ey * ey;
      if (d2 <= r02) is_inner = true;
      else if (d2 > r2) is_outer = true;
    }
    if (is_inner) inner.push_back({std::atan2(dy, dx), s});
    if (is_outer) outer.push_back(s);
  }
  UnionFind uf;
  uf.reset(lat.nsites());
  const std::vector<bool> seq = contact_sequence(c, half, std::move(inner), outer, uf);
  if (linear_subsequence(seq, pat.colours)) return true;
  std::vector<bool> rev(pat.colours.rbegin(), pat.colours.rend());
  return linear_subsequence(seq, rev);
}

void LatticeComponents::build(const Configuration& c, const TriLattice& l) {
  lat = &l;
  cfg = &c;
  uf.reset(l.nsites());
  const int W = l.W, H = l.H;
  for (int j = 0; j < H; ++j) {
    const bool up = j + 1 < H;
    for (int i = 0; i < W; ++i) {
      const Site s = l.at(i, j);
      const bool col = c.open(s);
      if (i + 1 < W && c.open(s + 1) == col) uf.unite(s, s + 1);
      if (up) {
        if (c.open(s + W) == col) uf.unite(s, s + W);
        if (i >= 1 && c.open(s + W - 1) == col) uf.unite(s, s + W - 1);
      }
    }
  }
  minx.assign(size_t(l.nsites()), 0.0);
  maxx.assign(size_t(l.nsites()), 0.0);
  maxy.assign(size_t(l.nsites()), 0.0);
  std::vector<uint8_t> seen(size_t(l.nsites()), 0);
  for (Site s = 0; s < Site(l.nsites()); ++s) {
    const int r = uf.find(s);
    const Point z = l.pos(s);
    if (!seen[size_t(r)]) {
      seen[size_t(r)] = 1;
      minx[size_t(r)] = maxx[size_t(r)] = z.x;
      maxy[size_t(r)] = z.y;
    } else {
      minx[size_t(r)] = std::min(minx[size_t(r)], z.x);
      maxx[size_t(r)] = std::max(maxx[size_t(r)], z.x);
      maxy[size_t(r)] = std::max(maxy[size_t(r)], z.y);
    }
  }
}

bool LatticeComponents::reaches(int root, Point q, double r) const {
  const double lox = minx[size_t(root)], hix = maxx[size_t(root)], hiy = maxy[size_t(root)];
  // a site attains each extreme coordinate, so these are reachable distances
  const double lb = std::max({std::abs(hix - q.x), std::abs(q.x - lox), hiy - q.y});
  if (lb >= r) return true;
  // upper bound over the box corners (y in [0, hiy])
  const double mx = std::max(std::abs(hix - q.x), std::abs(q.x - lox));
  const double dy = std::max(std::abs(hiy - q.y), std::abs(q.y));
  if (mx * mx + dy * dy < r * r) return false;
  // ambiguous band: exact scan
  UnionFind& u = const_cast<UnionFind&>(uf);
  const double r2 = r * r;
  for (Site s = 0; s < Site(lat->nsites()); ++s) {
    if (u.find(s) != root) continue;
    const Point z = lat->pos(s);
    const double dx = z.x - q.x, dz = z.y - q.y;
    if (dx * dx + dz * dz >= r2) return true;
  }
  return false;
}

std::vector<MeetingPoint> two_arm_meeting_points(const LatticeComponents& comps, double a,
                                                 double b, double r) {
  const TriLattice& lat = *comps.lat;
  const Configuration& c = *comps.cfg;
  if (lat.geom != Geometry::HalfPlaneStrip)
    throw std::invalid_argument("two_arm_meeting_points: needs a half-plane lattice");
  if (!(a < b)) throw std::invalid_argument("two_arm_meeting_points: needs a < b");
  UnionFind& uf = const_cast<UnionFind&>(comps.uf);

  std::vector<MeetingPoint> out;
  int last_open = -1, last_closed = -1;
  bool in_run = false;
  const int ilo = std::max(0, int(std::floor(a)) + 1);
  const int ihi = std::min(lat.W - 1, int(std::ceil(b)) - 1);
  for (int i = ilo; i + 1 <= ihi; ++i) {
    const Site s = lat.at(i, 0), t = s + 1;
    if (c.open(s) == c.open(t)) {
      in_run = false;
      continue;
    }
    const Site so = c.open(s) ? s : t, sc = c.open(s) ? t : s;
    const int ro = uf.find(so), rc = uf.find(sc);
    const Point q = lat.pos(s);
    if (!comps.reaches(ro, q, r) || !comps.reaches(rc, q, r)) {
      in_run = false;
      continue;
    }
    if (in_run && ro == last_open && rc == last_closed) continue;  // same plateau
    out.push_back({s, ro, rc});
    last_open = ro;
    last_closed = rc;
    in_run = true;
  }
  return out;
}

std::vector<MeetingPoint> two_arm_meeting_points(const Configuration& c, const TriLattice& lat,
                                                 double a, double b, double r) {
  LatticeComponents comps;
  comps.build(c, lat);
  return two_arm_meeting_points(comps, a, b, r);
}

}  // namespace percolog
