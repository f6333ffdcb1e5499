#include "percolog/multiscale.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace percolog {

namespace {

constexpr double kSqrt3 = 1.7320508075688772935;

// Disk of radius r around c stays inside the lattice hull (a parallelogram
// with slanted left/right edges); on a half-plane the bottom edge is open.
bool disk_fits(const TriLattice& lat, Point c, double r) {
  const double ymax = (lat.H - 1) * kRowHeight;
  if (c.y + r > ymax) return false;
  if (lat.geom == Geometry::BulkBox && c.y - r < 0.0) return false;
  const double skew = c.x - c.y / kSqrt3;  // distance along the bottom axis
  const double margin = 2.0 * r / kSqrt3;  // slant-corrected disk extent
  return skew - margin >= 0.0 && skew + margin <= double(lat.W - 1);
}

struct KeyMap {
  int N;
  size_t joint = 0, residual = 1;
  size_t bucket(int n) const { return 2 + size_t(0 * N) + size_t(n - 1); }
  size_t a(int n) const { return 2 + size_t(1 * N) + size_t(n - 1); }
  size_t b(int n) const { return 2 + size_t(2 * N) + size_t(n - 1); }
  size_t c(int n) const { return 2 + size_t(3 * N) + size_t(n - 1); }
  size_t d(int n) const { return 2 + size_t(4 * N) + size_t(n - 1); }
  size_t e(int n) const { return 2 + size_t(5 * N) + size_t(n - 1); }
  size_t f(int n) const { return 2 + size_t(6 * N) + size_t(n - 1); }
  size_t h(int n) const { return 2 + size_t(7 * N) + size_t(n - 1); }
};

// both endpoints' components touch an open site of the rim
bool reaches_rim(const Configuration& c, UnionFind& uf, const std::vector<Site>& rim, Site za,
                 Site zb) {
  const int32_t ra = uf.find(za), rb = uf.find(zb);
  bool ha = false, hb = false;
  for (Site s : rim) {
    if (!c.open(s)) continue;
    const int32_t r = uf.find(s);
    ha = ha || r == ra;
    hb = hb || r == rb;
    if (ha && hb) return true;
  }
  return false;
}

double ratio_or_zero(double num, double den) { return den > 0.0 ? num / den : 0.0; }

}  // namespace

ScaleLadder make_ladder(const TriLattice& lat, std::array<Site, 4> z, Point center,
                        std::vector<double> radii) {
  if (radii.size() < 2) throw std::invalid_argument("make_ladder: needs a core plus one scale");
  for (size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > 0.0)) throw std::invalid_argument("make_ladder: radii must be positive");
    if (k && !(radii[k] > radii[k - 1]))
      throw std::invalid_argument("make_ladder: radii must be strictly increasing");
  }
  for (int k = 0; k < 4; ++k) {
    if (z[k] < 0 || z[k] >= lat.nsites())
      throw std::invalid_argument("make_ladder: probe site out of range");
    for (int l = 0; l < k; ++l)
      if (z[k] == z[l]) throw std::invalid_argument("make_ladder: duplicate probe site");
  }

  ScaleLadder lad;
  lad.lat = &lat;
  lad.s = z;
  lad.center = center;
  lad.N = int(radii.size()) - 1;
  lad.radius = std::move(radii);
  lad.s12 = dist(lat.pos(z[0]), lat.pos(z[1]));
  if (lad.N + 1 > 254) throw std::invalid_argument("make_ladder: too many scales");

  const int ns = lat.nsites();
  lad.stage.assign(size_t(ns), uint8_t(lad.N + 1));
  lad.shell.assign(size_t(lad.N) + 1, {});
  for (Site s = 0; s < ns; ++s) {
    const double d = dist(lat.pos(s), center);
    for (int n = 0; n <= lad.N; ++n)
      if (d <= lad.radius[size_t(n)]) {
        lad.stage[size_t(s)] = uint8_t(n);
        lad.shell[size_t(n)].push_back(s);
        break;
      }
    if (lad.stage[size_t(s)] == uint8_t(lad.N + 1))
      lad.outside.push_back(s);
    else
      lad.disk_sites.push_back(s);
  }

  if (lad.stage[size_t(z[0])] != 0 || lad.stage[size_t(z[1])] != 0)
    throw std::invalid_argument("make_ladder: probe pair must sit inside the core disk");
  if (lad.stage[size_t(z[2])] != uint8_t(lad.N + 1) ||
      lad.stage[size_t(z[3])] != uint8_t(lad.N + 1))
    throw std::invalid_argument("make_ladder: distant pair must sit outside the last disk");

  lad.rim_in.assign(size_t(lad.N), {});
  lad.rim_out.assign(size_t(lad.N) + 1, {});
  Site nb[6];
  for (Site s = 0; s < ns; ++s) {
    const int st = lad.stage[size_t(s)];
    const int deg = lat.neighbors(s, nb);
    int lo = st, hi = st;  // neighbour stage extremes
    for (int k = 0; k < deg; ++k) {
      lo = std::min(lo, int(lad.stage[size_t(nb[k])]));
      hi = std::max(hi, int(lad.stage[size_t(nb[k])]));
    }
    // s sits on rim_in[m] for every boundary m it is inside of but adjacent
    // to the outside of: st <= m < hi, m < N
    for (int m = st; m < hi && m < lad.N; ++m)
      if (m >= 0) lad.rim_in[size_t(m)].push_back(s);
    // s sits on rim_out[n] for lo <= n < st, n >= 1
    for (int n = std::max(lo, 1); n < st && n <= lad.N; ++n)
      lad.rim_out[size_t(n)].push_back(s);
  }
  return lad;
}

ScaleLadder build_scales(const TriLattice& lat, std::array<Site, 4> z) {
  const Point p1 = lat.pos(z[0]), p2 = lat.pos(z[1]);
  const double s12 = dist(p1, p2);
  if (s12 < 4.0) throw std::invalid_argument("build_scales: probe pair closer than 4 units");
  const Point c{0.5 * (p1.x + p2.x), 0.5 * (p1.y + p2.y)};
  const double d3 = dist(lat.pos(z[2]), c), d4 = dist(lat.pos(z[3]), c);

  std::vector<double> radii = {s12};
  for (int n = 1;; ++n) {
    const double r = std::ldexp(s12, n);  // 2^n * s12
    if (!disk_fits(lat, c, r)) break;
    if (!(d3 > r && d4 > r)) break;
    radii.push_back(r);
  }
  if (radii.size() < 4)
    throw std::invalid_argument("build_scales: geometry too tight for three scales");
  return make_ladder(lat, z, c, std::move(radii));
}

std::vector<std::string> multiscale_keys(int N) {
  if (N < 1) throw std::invalid_argument("multiscale_keys: N must be >= 1");
  std::vector<std::string> keys = {"joint", "residual"};
  const char* fams[8] = {"bucket", "a", "b", "c", "d", "e", "f", "h"};
  for (const char* fam : fams)
    for (int n = 1; n <= N; ++n) keys.push_back(std::string(fam) + std::to_string(n));
  return keys;
}

void eval_multiscale(const Configuration& c, const ScaleLadder& lad, MultiscaleArena& ar,
                     uint64_t* t) {
  const TriLattice& lat = *lad.lat;
  const int N = lad.N;
  const KeyMap K{N};
  const Site s1 = lad.s[0], s2 = lad.s[1], s3 = lad.s[2], s4 = lad.s[3];
  const bool p12 = c.open(s1) && c.open(s2);
  const bool p34 = c.open(s3) && c.open(s4);

  ar.conn_in.assign(size_t(N) + 1, 0);
  ar.f12.assign(size_t(N), 0);
  ar.f34.assign(size_t(N) + 1, 0);
  ar.conn_comp.assign(size_t(N) + 1, 0);

  Site nb[6];
  if (p12) {
    // grow the disk shell by shell; query pair connection and rim reach as
    // each B_k completes
    UnionFind& uf = ar.uf_disk;
    uf.ensure(lat.nsites());
    uf.reset_sites(lad.disk_sites);
    for (int k = 0; k <= N; ++k) {
      for (Site s : lad.shell[size_t(k)]) {
        if (!c.open(s)) continue;
        const int deg = lat.neighbors(s, nb);
        for (int e = 0; e < deg; ++e) {
          const Site u = nb[e];
          const int su = lad.stage[size_t(u)];
          if ((su < k || (su == k && u < s)) && c.open(u)) uf.unite(s, u);
        }
      }
      ar.conn_in[size_t(k)] = uf.same(s1, s2);
      if (k < N) ar.f12[size_t(k)] = reaches_rim(c, uf, lad.rim_in[size_t(k)], s1, s2);
    }
  }

  if (p34) {
    // peel inward: components of B_n^c exist right after shell n+1 lands
    UnionFind& uf = ar.uf_comp;
    uf.reset(lat.nsites());
    auto add_group = [&](const std::vector<Site>& group, int g) {
      for (Site s : group) {
        if (!c.open(s)) continue;
        const int deg = lat.neighbors(s, nb);
        for (int e = 0; e < deg; ++e) {
          const Site u = nb[e];
          const int su = lad.stage[size_t(u)];
          if ((su > g || (su == g && u < s)) && c.open(u)) uf.unite(s, u);
        }
      }
    };
    add_group(lad.outside, N + 1);
    ar.f34[size_t(N)] = reaches_rim(c, uf, lad.rim_out[size_t(N)], s3, s4);
    ar.conn_comp[size_t(N)] = uf.same(s3, s4);
    for (int g = N; g >= 2; --g) {
      add_group(lad.shell[size_t(g)], g);
      ar.f34[size_t(g) - 1] = reaches_rim(c, uf, lad.rim_out[size_t(g) - 1], s3, s4);
      ar.conn_comp[size_t(g) - 1] = uf.same(s3, s4);
    }
    add_group(lad.shell[1], 1);
    add_group(lad.shell[0], 0);
  }
  const bool conn_full_34 = p34 && ar.uf_comp.same(s3, s4);
  const bool conn_full_12 = p34 && p12 && ar.uf_comp.same(s1, s2);

  int first_n = -1;  // scale of first z1-z2 connection; 0 means inside the core
  if (p12)
    for (int k = 0; k <= N; ++k)
      if (ar.conn_in[size_t(k)]) {
        first_n = k;
        break;
      }

  if (conn_full_12 && conn_full_34) {
    ++t[K.joint];
    if (!ar.conn_in[size_t(N)])
      ++t[K.residual];
    else if (ar.conn_in[1])
      ++t[K.bucket(1)];
    else
      ++t[K.bucket(first_n)];
  }

  for (int n = 1; n <= N; ++n) {
    const bool An = first_n == n;
    const bool hook = conn_full_34 && !ar.conn_comp[size_t(n)];
    if (An && ar.f34[size_t(n)]) {
      ++t[K.a(n)];
      if (hook) ++t[K.b(n)];
    }
    if (ar.f34[size_t(n)]) {
      ++t[K.c(n)];
      if (hook) ++t[K.d(n)];
    }
    if (ar.f12[size_t(n) - 1]) {
      ++t[K.e(n)];
      if (ar.f34[size_t(n)]) ++t[K.f(n)];
    }
    if (An && ar.conn_comp[size_t(n)]) ++t[K.h(n)];
  }
}

EventCounts estimate_multiscale(const ScaleLadder& lad, uint64_t n_samples, uint64_t seed,
                                int batches) {
  check_batching(n_samples, batches);
  EventCounts ec(multiscale_keys(lad.N));
  MultiscaleArena ar;
  Configuration c;
  std::vector<uint64_t> t;
  for (int b = 0; b < batches; ++b) {
    const BatchRange br = batch_range(n_samples, batches, b);
    t.assign(ec.keys.size(), 0);
    for (uint64_t idx = br.first; idx < br.first + br.n; ++idx) {
      sample_configuration(*lad.lat, seed, idx, c);
      eval_multiscale(c, lad, ar, t.data());
    }
    ec.add_batch({seed, br.first, br.n, t});
  }
  return ec;
}

GnRow estimate_gn(const EventCounts& ec, const ScaleLadder& lad, int n) {
  if (n < 1 || n > lad.N) throw std::invalid_argument("estimate_gn: scale out of range");
  const KeyMap K{lad.N};
  GnRow row;
  row.n = n;
  row.radius = lad.radius[size_t(n)];
  row.cond_first = ec.total(K.a(n));
  row.cond_reach = ec.total(K.c(n));
  row.defined = row.cond_first >= 100 && row.cond_reach >= 100;
  if (!row.defined) return row;
  const size_t ka = K.a(n), kb = K.b(n), kc = K.c(n), kd = K.d(n);
  row.g = jackknife(ec, [=](const std::vector<double>& t, double) {
    return ratio_or_zero(t[kb], t[ka]) - ratio_or_zero(t[kd], t[kc]);
  });
  return row;
}

LogSumFit partial_log_sum(const EventCounts& ec, const ScaleLadder& lad, int prefix) {
  if (prefix < 3) throw std::invalid_argument("partial_log_sum: needs at least 3 scales");
  if (prefix > lad.N) throw std::invalid_argument("partial_log_sum: prefix exceeds ladder");
  const KeyMap K{lad.N};

  const auto S_of = [&](const std::vector<double>& t, int upto) {
    double s = 0.0;
    for (int n = 1; n <= upto; ++n)
      s += ratio_or_zero(t[K.b(n)], t[K.a(n)]) - ratio_or_zero(t[K.d(n)], t[K.c(n)]);
    return s;
  };

  LogSumFit out;
  for (int N = 1; N <= prefix; ++N) {
    const Estimate e = jackknife(
        ec, [&, N](const std::vector<double>& t, double) { return S_of(t, N); });
    out.S.push_back(e.value);
    out.S_sigma.push_back(e.sigma);
  }

  std::vector<FitPoint> pts;
  for (int N = 1; N <= prefix; ++N)
    pts.push_back({double(N), out.S[size_t(N) - 1], out.S_sigma[size_t(N) - 1]});
  out.fit = fit_linear(pts);

  // leave-one-batch replication of the whole pipeline, with frozen weights
  std::vector<double> totals(ec.keys.size(), 0.0);
  for (const BatchRecord& b : ec.batches)
    for (size_t k = 0; k < totals.size(); ++k) totals[k] += double(b.tallies[k]);
  const size_t B = ec.batches.size();
  std::vector<double> slopes;
  slopes.reserve(B);
  for (const BatchRecord& b : ec.batches) {
    std::vector<double> rest(totals);
    for (size_t k = 0; k < rest.size(); ++k) rest[k] -= double(b.tallies[k]);
    std::vector<FitPoint> rp;
    for (int N = 1; N <= prefix; ++N)
      rp.push_back({double(N), S_of(rest, N), out.S_sigma[size_t(N) - 1]});
    slopes.push_back(fit_linear(rp).slope);
  }
  double mean = 0.0;
  for (double s : slopes) mean += s;
  mean /= double(B);
  double var = 0.0;
  for (double s : slopes) var += (s - mean) * (s - mean);
  out.slope_sigma = B >= 2 ? std::sqrt(var * double(B - 1) / double(B)) : 0.0;
  return out;
}

MultiscaleReport multiscale_report(const EventCounts& ec, const ScaleLadder& lad) {
  const KeyMap K{lad.N};
  MultiscaleReport rep;
  for (int n = 1; n <= lad.N; ++n) rep.g.push_back(estimate_gn(ec, lad, n));
  rep.prefix = 0;
  while (rep.prefix < lad.N && rep.g[size_t(rep.prefix)].defined) ++rep.prefix;
  if (rep.prefix >= 3) rep.logsum = partial_log_sum(ec, lad, rep.prefix);

  for (int n = 1; n <= lad.N; ++n) {
    const size_t ke = K.e(n), kf = K.f(n), kc = K.c(n);
    rep.factor_gap.push_back(jackknife(ec, [=](const std::vector<double>& t, double ns) {
      return t[kf] / ns - (t[ke] / ns) * (t[kc] / ns);
    }));
  }

  rep.joint = ec.total(K.joint);
  uint64_t parts = ec.total(K.residual);
  for (int n = 1; n <= lad.N; ++n) parts += ec.total(K.bucket(n));
  rep.telescoping_exact = parts == rep.joint;
  return rep;
}

}  // namespace percolog
