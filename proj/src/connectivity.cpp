#include "percolog/connectivity.hpp"

#include <stdexcept>

namespace percolog {

// Each undirected edge is visited once, from its lower-index endpoint. The
// three higher-index neighbours of (i,j) are (i+1,j), (i,j+1), (i-1,j+1).
void build_components(const Configuration& c, const RegionMask& m, bool colour_open,
                      UnionFind& uf) {
  const TriLattice& lat = *m.lat;
  const int W = lat.W, H = lat.H;
  for (Site s : m.sites) {
    if (c.open(s) != colour_open) continue;
    const int i = int(s) % W, j = int(s) / W;
    if (i + 1 < W) {
      const Site t = s + 1;
      if (m.contains(t) && c.open(t) == colour_open) uf.unite(s, t);
    }
    if (j + 1 < H) {
      const Site t = s + W;
      if (m.contains(t) && c.open(t) == colour_open) uf.unite(s, t);
      if (i >= 1) {
        const Site t2 = s + W - 1;
        if (m.contains(t2) && c.open(t2) == colour_open) uf.unite(s, t2);
      }
    }
  }
}

void build_components_full(const Configuration& c, const TriLattice& lat, bool colour_open,
                           UnionFind& uf) {
  const int W = lat.W, H = lat.H;
  const uint64_t want = colour_open ? ~0ull : 0ull;
  for (int j = 0; j < H; ++j) {
    const Site base = Site(j) * W;
    const bool up = j + 1 < H;
    for (int i = 0; i < W; ++i) {
      const Site s = base + i;
      if (((c.words[size_t(s) >> 6] ^ want) >> (uint64_t(s) & 63)) & 1) continue;
      if (i + 1 < W && c.open(s + 1) == colour_open) uf.unite(s, s + 1);
      if (up) {
        if (c.open(s + W) == colour_open) uf.unite(s, s + W);
        if (i >= 1 && c.open(s + W - 1) == colour_open) uf.unite(s, s + W - 1);
      }
    }
  }
}

ClusterLabeling label_clusters(const Configuration& c, const RegionMask& m, bool colour_open) {
  UnionFind uf;
  uf.reset(m.lat->nsites());
  build_components(c, m, colour_open, uf);
  ClusterLabeling out;
  out.label.assign(size_t(m.lat->nsites()), -1);
  std::vector<int32_t> canon(size_t(m.lat->nsites()), -1);
  for (Site s : m.sites) {  // ascending, so first touch of a root is its minimum
    if (c.open(s) != colour_open) continue;
    const int r = uf.find(s);
    if (canon[size_t(r)] < 0) canon[size_t(r)] = s;
    out.label[size_t(s)] = canon[size_t(r)];
  }
  return out;
}

bool connected_within(const Configuration& c, const RegionMask& a, Site s1, Site s2) {
  if (!a.contains(s1) || !a.contains(s2))
    throw std::invalid_argument("connected_within: probe site outside the region");
  if (!c.open(s1) || !c.open(s2)) return false;
  if (s1 == s2) return true;
  UnionFind uf;
  uf.reset(a.lat->nsites());
  build_components(c, a, true, uf);
  return uf.same(s1, s2);
}

bool connected_not_within(const Configuration& c, const RegionMask& a, const RegionMask& b,
                          Site s1, Site s2) {
  for (Site s : b.sites)
    if (!a.contains(s)) throw std::invalid_argument("connected_not_within: B not inside A");
  if (!b.contains(s1) || !b.contains(s2))
    throw std::invalid_argument("connected_not_within: probe site outside B");
  return connected_within(c, a, s1, s2) && !connected_within(c, b, s1, s2);
}

const char* to_string(PartitionClass pc) {
  switch (pc) {
    case PartitionClass::AllFour: return "all_four";
    case PartitionClass::P12_34: return "p12_34";
    case PartitionClass::P13_24: return "p13_24";
    case PartitionClass::P14_23: return "p14_23";
    default: return "other";
  }
}

PartitionClass partition_from_components(const Configuration& c, UnionFind& uf,
                                         const std::array<Site, 4>& z) {
  for (int k = 0; k < 4; ++k)
    for (int l = k + 1; l < 4; ++l)
      if (z[k] == z[l]) throw std::invalid_argument("cluster_partition: duplicate mark");
  for (int k = 0; k < 4; ++k)
    if (!c.open(z[k])) return PartitionClass::Other;
  const int r1 = uf.find(z[0]), r2 = uf.find(z[1]), r3 = uf.find(z[2]), r4 = uf.find(z[3]);
  if (r1 == r2 && r1 == r3 && r1 == r4) return PartitionClass::AllFour;
  if (r1 == r2 && r3 == r4 && r1 != r3) return PartitionClass::P12_34;
  if (r1 == r3 && r2 == r4 && r1 != r2) return PartitionClass::P13_24;
  if (r1 == r4 && r2 == r3 && r1 != r2) return PartitionClass::P14_23;
  return PartitionClass::Other;
}

PartitionClass cluster_partition(const Configuration& c, const TriLattice& lat,
                                 const std::array<Site, 4>& z) {
  UnionFind uf;
  uf.reset(lat.nsites());
  build_components_full(c, lat, true, uf);
  return partition_from_components(c, uf, z);
}

}  // namespace percolog
