#pragma once
// Comparison baselines: Euclidean minimum spanning tree and the MST-Cut
// partitioner (equivalent to single-linkage clustering).

#include <utility>
#include <vector>

#include "spanforest/core.hpp"

namespace spanforest {

// A spanning tree over the data rows (0-based indices; the hub plays no
// role here) with Euclidean edge lengths. Edges are stored as (min,max)
// pairs in the order Prim's algorithm added them.
struct WeightedTree {
  int n = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<double> lengths;
};

// Euclidean MST by Prim's algorithm, O(n^2), no edge list materialized.
// Distance ties are broken by the lexicographically smallest (min,max)
// edge, making the result deterministic.
WeightedTree mst(const Dataset& data);

// Delete the K-1 longest edges (ties by insertion index) and return the
// component partition; equivalent to cutting single linkage at K clusters.
Partition mst_cut(const WeightedTree& tree, int k);

// Variant cutting the top fraction q of longest edges: removes
// floor(q * (n-1)) edges, yielding that many + 1 components.
Partition mst_cut_fraction(const WeightedTree& tree, double q);

}  // namespace spanforest
