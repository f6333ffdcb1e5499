#include "percolog/mixedboundary.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace percolog {
namespace {

// sites within Euclidean distance 2 of the boundary point (x, 0)
std::vector<Site> anchor_nbhd(const TriLattice& lat, int x) {
  std::vector<Site> out;
  const Point q{double(x), 0.0};
  for (int j = 0; j <= 2 && j < lat.H; ++j)
    for (int i = std::max(0, x - 3); i <= std::min(lat.W - 1, x + 2); ++i) {
      const Site s = lat.at(i, j);
      if (dist(lat.pos(s), q) <= 2.0) out.push_back(s);
    }
  return out;
}

double interval_gap(int x, int x3, int x4) {
  return x < x3 ? double(x3 - x) : double(x - x4);
}

void push_root(std::vector<int32_t>& roots, int32_t r) {
  if (std::find(roots.begin(), roots.end(), r) == roots.end()) roots.push_back(r);
}

// unit-capacity augmenting path s -> t over an explicit residual graph
struct FlowEdge {
  int to, rev, cap;
};

bool augment(std::vector<std::vector<FlowEdge>>& adj, int s, int t, std::vector<int>& pre_node,
             std::vector<int>& pre_edge) {
  std::fill(pre_node.begin(), pre_node.end(), -1);
  std::queue<int> q;
  q.push(s);
  pre_node[size_t(s)] = s;
  while (!q.empty() && pre_node[size_t(t)] < 0) {
    const int u = q.front();
    q.pop();
    for (int e = 0; e < int(adj[size_t(u)].size()); ++e) {
      const FlowEdge& ed = adj[size_t(u)][size_t(e)];
      if (ed.cap > 0 && pre_node[size_t(ed.to)] < 0) {
        pre_node[size_t(ed.to)] = u;
        pre_edge[size_t(ed.to)] = e;
        q.push(ed.to);
      }
    }
  }
  if (pre_node[size_t(t)] < 0) return false;
  for (int v = t; v != s; v = pre_node[size_t(v)]) {
    FlowEdge& ed = adj[size_t(pre_node[size_t(v)])][size_t(pre_edge[size_t(v)])];
    ed.cap -= 1;
    adj[size_t(v)][size_t(ed.rev)].cap += 1;
  }
  return true;
}

// Two paths within the closed cluster rooted at A, one from each anchor
// neighbourhood into the interval, sharing no site except possibly landing
// sites. Node-split max flow: gateway capacity 1 per anchor, interval sites
// capacity 2 (the arms may land together), everything else capacity 1.
bool two_disjoint_arms(const Configuration& c, const MixedGeometry& g, LatticeComponents& comps,
                       int32_t A) {
  const TriLattice& lat = *g.lat;
  std::vector<int32_t> loc(size_t(lat.nsites()), -1);
  std::vector<Site> members;
  for (Site s = 0; s < Site(lat.nsites()); ++s)
    if (!c.open(s) && comps.uf.find(s) == A) {
      loc[size_t(s)] = int32_t(members.size());
      members.push_back(s);
    }
  std::vector<uint8_t> in_interval(size_t(lat.nsites()), 0);
  for (Site s : g.interval) in_interval[size_t(s)] = 1;

  const int M = int(members.size());
  const int S = 2 * M, G1 = 2 * M + 1, G2 = 2 * M + 2, T = 2 * M + 3;
  std::vector<std::vector<FlowEdge>> adj(size_t(2 * M + 4));
  const auto add = [&adj](int u, int v, int cap) {
    adj[size_t(u)].push_back({v, int(adj[size_t(v)].size()), cap});
    adj[size_t(v)].push_back({u, int(adj[size_t(u)].size()) - 1, 0});
  };
  Site nb[6];
  for (int k = 0; k < M; ++k) {
    const Site s = members[size_t(k)];
    add(2 * k, 2 * k + 1, in_interval[size_t(s)] ? 2 : 1);
    const int deg = lat.neighbors(s, nb);
    for (int e = 0; e < deg; ++e) {
      const int32_t kk = loc[size_t(nb[e])];
      if (kk >= 0) add(2 * k + 1, 2 * kk, 2);
    }
    if (in_interval[size_t(s)]) add(2 * k + 1, T, 2);
  }
  add(S, G1, 1);
  add(S, G2, 1);
  for (Site s : g.nbhd1)
    if (loc[size_t(s)] >= 0) add(G1, 2 * loc[size_t(s)], 1);
  for (Site s : g.nbhd2)
    if (loc[size_t(s)] >= 0) add(G2, 2 * loc[size_t(s)], 1);

  std::vector<int> pre_node(adj.size()), pre_edge(adj.size());
  int flow = 0;
  while (flow < 2 && augment(adj, S, T, pre_node, pre_edge)) ++flow;
  return flow == 2;
}

}  // namespace

std::string to_string(MixedEventClass cls) {
  switch (cls) {
    case MixedEventClass::Disconnected:
      return "disconnected";
    case MixedEventClass::Pinched:
      return "pinched";
    case MixedEventClass::ThreeAlternatingArms:
      return "three_arms";
    case MixedEventClass::SameClusterLanding:
      return "same_cluster";
    case MixedEventClass::None:
      return "none";
  }
  return "?";
}

MixedGeometry mixed_geometry(const TriLattice& lat, int x1, int x2, int x3, int x4,
                             double r_macro) {
  if (lat.geom != Geometry::HalfPlaneStrip)
    throw std::invalid_argument("mixed_geometry: needs a half-plane lattice");
  for (int x : {x1, x2, x3, x4})
    if (x < 0 || x >= lat.W) throw std::invalid_argument("mixed_geometry: mark off the strip");
  if (x1 >= x2 || x3 >= x4) throw std::invalid_argument("mixed_geometry: marks unordered");
  if (x4 - x3 < 2) throw std::invalid_argument("mixed_geometry: empty landing interval");
  if (x2 - x1 < 5)
    throw std::invalid_argument("mixed_geometry: anchor neighbourhoods overlap");
  for (int x : {x1, x2})
    if (x >= x3 - 2 && x <= x4 + 2)
      throw std::invalid_argument("mixed_geometry: anchor overlaps the landing interval");

  MixedGeometry g;
  g.lat = &lat;
  g.x1 = x1;
  g.x2 = x2;
  g.x3 = x3;
  g.x4 = x4;
  if (r_macro == 0.0)
    r_macro = 0.5 * std::min(interval_gap(x1, x3, x4), interval_gap(x2, x3, x4));
  if (r_macro < 1.0 || r_macro > double(lat.W))
    throw std::invalid_argument("mixed_geometry: r_macro out of range");
  g.r_macro = r_macro;
  g.nbhd1 = anchor_nbhd(lat, x1);
  g.nbhd2 = anchor_nbhd(lat, x2);
  for (int i = x3 + 1; i <= x4 - 1; ++i) g.interval.push_back(lat.at(i, 0));
  return g;
}

MixedResult classify_mixed_event(const Configuration& c, const MixedGeometry& g,
                                 LatticeComponents& comps) {
  comps.build(c, *g.lat);

  std::vector<int32_t> iv_roots;
  for (Site s : g.interval)
    if (!c.open(s)) push_root(iv_roots, comps.uf.find(s));
  std::vector<int32_t> r1, r2;
  if (!iv_roots.empty()) {
    for (Site s : g.nbhd1)
      if (!c.open(s)) {
        const int32_t r = comps.uf.find(s);
        if (std::find(iv_roots.begin(), iv_roots.end(), r) != iv_roots.end()) push_root(r1, r);
      }
    for (Site s : g.nbhd2)
      if (!c.open(s)) {
        const int32_t r = comps.uf.find(s);
        if (std::find(iv_roots.begin(), iv_roots.end(), r) != iv_roots.end()) push_root(r2, r);
      }
  }

  if (r1.empty() && r2.empty()) return {MixedEventClass::Disconnected, -1, -1};
  if (r1.empty() || r2.empty()) return {MixedEventClass::None, -1, -1};
  const bool shared_single = r1.size() == 1 && r2.size() == 1 && r1[0] == r2[0];
  if (!shared_single) return {MixedEventClass::ThreeAlternatingArms, -1, -1};

  const int32_t A = r1[0];
  if (!two_disjoint_arms(c, g, comps, A)) return {MixedEventClass::Pinched, -1, A};

  Site y = -1;
  for (const MeetingPoint& mp :
       two_arm_meeting_points(comps, double(g.x3), double(g.x4), g.r_macro))
    if (mp.closed_cluster == A) {
      y = mp.y;
      break;
    }
  if (y < 0)  // no qualified two-arm point: report the leftmost landing site
    for (Site s : g.interval)
      if (!c.open(s) && comps.uf.find(s) == A) {
        y = s;
        break;
      }
  return {MixedEventClass::SameClusterLanding, y, A};
}

MixedResult classify_mixed_event(const Configuration& c, const MixedGeometry& g) {
  LatticeComponents comps;
  return classify_mixed_event(c, g, comps);
}

Configuration color_switch(const Configuration& c, const RegionMask& region) {
  Configuration out = c;
  out.flip_region(region);
  return out;
}

std::vector<std::string> mixed_keys() {
  return {"disconnected", "pinched", "three_arms", "same_cluster", "none"};
}

EventCounts estimate_mixed(const MixedGeometry& g, uint64_t n_samples, uint64_t seed,
                           int batches) {
  check_batching(n_samples, batches);
  EventCounts ec(mixed_keys());
  LatticeComponents comps;
  Configuration c;
  for (int b = 0; b < batches; ++b) {
    const BatchRange br = batch_range(n_samples, batches, b);
    std::vector<uint64_t> t(ec.keys.size(), 0);
    for (uint64_t k = 0; k < br.n; ++k) {
      sample_configuration(*g.lat, seed, br.first + k, c);
      ++t[size_t(classify_mixed_event(c, g, comps).cls)];
    }
    ec.add_batch({seed, br.first, br.n, t});
  }
  return ec;
}

LandingHistogram landing_density(const MixedGeometry& g, uint64_t n_samples, uint64_t seed,
                                 int bins) {
  if (bins < 2) throw std::invalid_argument("landing_density: needs at least 2 bins");
  LandingHistogram h;
  const double lo = double(g.x3), hi = double(g.x4), width = (hi - lo) / bins;
  for (int b = 0; b <= bins; ++b) h.edges.push_back(lo + b * width);
  h.count.assign(size_t(bins), 0);
  h.samples = n_samples;

  LatticeComponents comps;
  Configuration c;
  // a landing point is reported as the left site of an open/closed boundary
  // pair; the meeting point proper sits halfway to its right neighbour
  const auto tally = [&](Site y) {
    const double x = g.lat->pos(y).x + 0.5;
    const int b = std::min(bins - 1, std::max(0, int((x - lo) / width)));
    ++h.count[size_t(b)];
    ++h.landings;
  };
  for (uint64_t k = 0; k < n_samples; ++k) {
    sample_configuration(*g.lat, seed, k, c);
    const MixedResult res = classify_mixed_event(c, g, comps);
    if (res.cls != MixedEventClass::SameClusterLanding) continue;
    ++h.qualifying;
    // only genuine two-arm meeting points enter the histogram; a landing
    // cluster whose flanking open pockets stay microscopic contributes none
    for (const MeetingPoint& mp :
         two_arm_meeting_points(comps, double(g.x3), double(g.x4), g.r_macro))
      if (mp.closed_cluster == res.cluster) tally(mp.y);
  }
  if (h.qualifying < 1000 || h.landings == 0)
    throw std::runtime_error("landing_density: too few qualifying samples");

  const double n = double(h.landings);
  for (int b = 0; b < bins; ++b) {
    const double p = double(h.count[size_t(b)]) / n;
    h.density.push_back(p / width);
    h.sigma.push_back(std::sqrt(p * (1.0 - p) / n) / width);
  }
  return h;
}

double log_term_integrand(double x1, double x2, double y) {
  return 1.0 / (std::abs(y - x1) * std::abs(y - x2));
}

double log_term_integral(double x1, double x2, double x3, double x4) {
  if (!(x1 < x2 && x2 < x3 && x3 < x4))
    throw std::invalid_argument("log_term_integral: needs x1 < x2 < x3 < x4");
  return std::log((x4 - x2) * (x3 - x1) / ((x3 - x2) * (x4 - x1))) / (x2 - x1);
}

namespace {

double simpson(double fa, double fm, double fb, double h) { return (fa + 4.0 * fm + fb) * h / 6.0; }

double adapt(double x1, double x2, double a, double b, double fa, double fm, double fb,
             double whole, double tol, int depth) {
  const double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = log_term_integrand(x1, x2, lm), frm = log_term_integrand(x1, x2, rm);
  const double left = simpson(fa, flm, fm, m - a), right = simpson(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adapt(x1, x2, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adapt(x1, x2, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double log_term_quadrature(double x1, double x2, double x3, double x4, double tol) {
  if (!(x1 < x2 && x2 < x3 && x3 < x4))
    throw std::invalid_argument("log_term_quadrature: needs x1 < x2 < x3 < x4");
  const double fa = log_term_integrand(x1, x2, x3), fb = log_term_integrand(x1, x2, x4);
  const double fm = log_term_integrand(x1, x2, 0.5 * (x3 + x4));
  return adapt(x1, x2, x3, x4, fa, fm, fb, simpson(fa, fm, fb, x4 - x3), tol, 50);
}

}  // namespace percolog
