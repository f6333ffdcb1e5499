#include "percolog/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace percolog {

double dist(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

void validate(const LatticeSpec& spec) {
  if (spec.L < 4) throw std::invalid_argument("lattice size L must be >= 4");
  if (!(spec.p > 0.0 && spec.p < 1.0))
    throw std::invalid_argument("site probability p must lie strictly in (0,1)");
}

TriLattice::TriLattice(const LatticeSpec& spec) {
  validate(spec);
  geom = spec.geometry;
  p = spec.p;
  W = spec.L;
  H = (geom == Geometry::BulkBox) ? spec.L : std::max(2, spec.L / 2);
}

int TriLattice::neighbors(Site s, Site out[6]) const {
  static constexpr int di[6] = {1, -1, 0, 0, 1, -1};
  static constexpr int dj[6] = {0, 0, 1, -1, -1, 1};
  const int i = col(s), j = row(s);
  int n = 0;
  for (int k = 0; k < 6; ++k) {
    const int a = i + di[k], b = j + dj[k];
    if (inside(a, b)) out[n++] = at(a, b);
  }
  return n;
}

Site TriLattice::site_at(Point z) const {
  const int j0 = int(std::lround(z.y / kRowHeight));
  double best = -1.0;
  Site best_site = -1;
  for (int j = std::max(0, j0 - 1); j <= std::min(H - 1, j0 + 1); ++j) {
    const int i0 = int(std::lround(z.x - 0.5 * j));
    for (int i = std::max(0, i0 - 1); i <= std::min(W - 1, i0 + 1); ++i) {
      const Site s = at(i, j);
      const double dx = z.x - (i + 0.5 * j), dy = z.y - j * kRowHeight;
      const double d2 = dx * dx + dy * dy;
      if (best < 0.0 || d2 < best || (d2 == best && s < best_site)) {
        best = d2;
        best_site = s;
      }
    }
  }
  if (best_site < 0) throw std::invalid_argument("site_at: point outside lattice rows");
  return best_site;
}

Site TriLattice::boundary_site_at(double x) const {
  if (geom != Geometry::HalfPlaneStrip)
    throw std::invalid_argument("boundary_site_at requires a half-plane lattice");
  int i = int(std::ceil(x - 0.5));  // exact half-way ties resolve to the lower index
  i = std::clamp(i, 0, W - 1);
  return at(i, 0);
}

static RegionMask finish(const TriLattice& lat, std::vector<uint8_t> in, ShapeInfo info) {
  RegionMask m;
  m.lat = &lat;
  m.in = std::move(in);
  m.info = info;
  m.sites.reserve(256);
  for (Site s = 0; s < Site(lat.nsites()); ++s)
    if (m.in[size_t(s)]) m.sites.push_back(s);
  return m;
}

RegionMask disk_mask(const TriLattice& lat, Point c, double r) {
  if (r <= 0.0) throw std::invalid_argument("disk radius must be positive");
  std::vector<uint8_t> in(size_t(lat.nsites()), 0);
  const double r2 = r * r;
  const int jlo = std::max(0, int(std::floor((c.y - r) / kRowHeight)));
  const int jhi = std::min(lat.H - 1, int(std::ceil((c.y + r) / kRowHeight)));
  for (int j = jlo; j <= jhi; ++j) {
    const double dy = c.y - j * kRowHeight;
    if (dy * dy > r2) continue;
    const double half = std::sqrt(r2 - dy * dy);
    const int ilo = std::max(0, int(std::ceil(c.x - half - 0.5 * j)));
    const int ihi = std::min(lat.W - 1, int(std::floor(c.x + half - 0.5 * j)));
    for (int i = ilo; i <= ihi; ++i) in[size_t(lat.at(i, j))] = 1;
  }
  ShapeInfo info;
  info.kind = ShapeInfo::Disk;
  info.c = c;
  info.r = r;
  return finish(lat, std::move(in), info);
}

RegionMask annulus_mask(const TriLattice& lat, Point c, double r, double R) {
  if (!(0.0 < r && r < R)) throw std::invalid_argument("annulus needs 0 < r < R");
  RegionMask outer = disk_mask(lat, c, R);
  const double r2 = r * r;
  std::vector<uint8_t> in(size_t(lat.nsites()), 0);
  for (Site s : outer.sites) {
    const Point z = lat.pos(s);
    const double dx = z.x - c.x, dy = z.y - c.y;
    if (dx * dx + dy * dy > r2) in[size_t(s)] = 1;
  }
  ShapeInfo info;
  info.kind = ShapeInfo::Annulus;
  info.c = c;
  info.r = r;
  info.R = R;
  return finish(lat, std::move(in), info);
}

RegionMask halfplane_minus_notch_mask(const TriLattice& lat, Point c, double rho) {
  if (lat.geom != Geometry::HalfPlaneStrip)
    throw std::invalid_argument("notch regions require a half-plane lattice");
  if (rho <= 0.0) throw std::invalid_argument("notch radius must be positive");
  std::vector<uint8_t> in(size_t(lat.nsites()), 1);
  const double r2 = rho * rho;
  for (Site s = 0; s < Site(lat.nsites()); ++s) {
    const Point z = lat.pos(s);
    const double dx = z.x - c.x, dy = z.y - c.y;
    if (dx * dx + dy * dy <= r2) in[size_t(s)] = 0;
  }
  ShapeInfo info;
  info.kind = ShapeInfo::HalfPlaneMinusNotch;
  info.c = c;
  info.r = rho;
  return finish(lat, std::move(in), info);
}

RegionMask interval_mask(const TriLattice& lat, double a, double b) {
  if (lat.geom != Geometry::HalfPlaneStrip)
    throw std::invalid_argument("interval regions require a half-plane lattice");
  if (!(a < b)) throw std::invalid_argument("interval needs a < b");
  std::vector<uint8_t> in(size_t(lat.nsites()), 0);
  for (int i = 0; i < lat.W; ++i)
    if (a < double(i) && double(i) < b) in[size_t(lat.at(i, 0))] = 1;
  ShapeInfo info;
  info.kind = ShapeInfo::Interval;
  info.a = a;
  info.b = b;
  return finish(lat, std::move(in), info);
}

RegionMask complement_mask(const RegionMask& m) {
  std::vector<uint8_t> in(m.in.size());
  for (size_t k = 0; k < in.size(); ++k) in[k] = m.in[k] ? 0 : 1;
  ShapeInfo info;
  info.kind = (m.info.kind == ShapeInfo::Complement) ? ShapeInfo::Any : ShapeInfo::Complement;
  return finish(*m.lat, std::move(in), info);
}

RegionMask full_mask(const TriLattice& lat) {
  std::vector<uint8_t> in(size_t(lat.nsites()), 1);
  ShapeInfo info;
  info.kind = ShapeInfo::Full;
  return finish(lat, std::move(in), info);
}

std::vector<Site> mask_boundary(const RegionMask& b) {
  std::vector<Site> rim;
  Site nb[6];
  for (Site s : b.sites) {
    const int n = b.lat->neighbors(s, nb);
    for (int k = 0; k < n; ++k) {
      if (!b.contains(nb[k])) {
        rim.push_back(s);
        break;
      }
    }
  }
  return rim;
}

}  // namespace percolog
