#pragma once
#include <array>
#include <cstdint>
#include <vector>

#include "percolog/configuration.hpp"
#include "percolog/lattice.hpp"

namespace percolog {

// Disjoint-set forest over site indices. a[x] is the parent, or -(size) at a
// root. Path halving + union by size; reusable arena (reset per sample).
struct UnionFind {
  std::vector<int32_t> a;

  void reset(int n) { a.assign(size_t(n), -1); }

  // grow the arena without touching existing entries
  void ensure(int n) {
    if (a.size() < size_t(n)) a.resize(size_t(n), -1);
  }

  // re-arm only the listed sites; sound when every later find/unite stays
  // within the listed sites (cheaper than reset for small regions)
  void reset_sites(const std::vector<Site>& ss) {
    for (Site s : ss) a[size_t(s)] = -1;
  }

  int find(int x) {
    int r = x;
    while (a[size_t(r)] >= 0) r = a[size_t(r)];
    while (a[size_t(x)] >= 0) {
      const int nx = a[size_t(x)];
      a[size_t(x)] = r;
      x = nx;
    }
    return r;
  }

  bool unite(int x, int y) {
    x = find(x);
    y = find(y);
    if (x == y) return false;
    if (a[size_t(x)] > a[size_t(y)]) std::swap(x, y);  // x keeps the bigger tree
    a[size_t(x)] += a[size_t(y)];
    a[size_t(y)] = x;
    return true;
  }

  bool same(int x, int y) { return find(x) == find(y); }
  int size_of_root(int r) const { return -a[size_t(r)]; }
};

// Union pass over the sites of a mask carrying the given colour
// (colour_open = true joins open sites, false joins closed sites).
// Out-of-mask sites are treated as absent, not as the other colour.
// uf must be reset to lat.nsites() beforehand.
void build_components(const Configuration& c, const RegionMask& m, bool colour_open,
                      UnionFind& uf);

// Same, over the whole lattice (fast path, no mask lookups).
void build_components_full(const Configuration& c, const TriLattice& lat, bool colour_open,
                           UnionFind& uf);

// Canonical cluster labels: label[s] = minimum site index in the cluster of s,
// or -1 when s is outside the mask or of the other colour. Deterministic and
// independent of union order.
struct ClusterLabeling {
  std::vector<int32_t> label;
  int32_t operator[](Site s) const { return label[size_t(s)]; }
};

ClusterLabeling label_clusters(const Configuration& c, const RegionMask& m, bool colour_open);

// s1 and s2 joined by an open path inside region A (s1 == s2 open counts).
// Throws if s1 or s2 is outside A.
bool connected_within(const Configuration& c, const RegionMask& a, Site s1, Site s2);

// Connected inside A but not inside B. Requires B subset of A and s1, s2 in B.
bool connected_not_within(const Configuration& c, const RegionMask& a, const RegionMask& b,
                          Site s1, Site s2);

enum class PartitionClass { AllFour, P12_34, P13_24, P14_23, Other };

const char* to_string(PartitionClass pc);

// Partition of four marked sites by open-cluster membership, full lattice.
// Any closed mark, or any grouping other than {all four} / {12|34} / {13|24}
// / {14|23}, lands in Other. Marks must be pairwise distinct.
PartitionClass cluster_partition(const Configuration& c, const TriLattice& lat,
                                 const std::array<Site, 4>& z);

// as above but reusing a caller-provided arena holding full-lattice open components
PartitionClass partition_from_components(const Configuration& c, UnionFind& uf,
                                         const std::array<Site, 4>& z);

}  // namespace percolog
