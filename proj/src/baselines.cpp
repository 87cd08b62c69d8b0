#include "spanforest/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace spanforest {

WeightedTree mst(const Dataset& data) {
  const int n = data.n();
  WeightedTree tree;
  tree.n = n;
  tree.edges.reserve(n - 1);
  tree.lengths.reserve(n - 1);

  // Prim from node 0 on squared distances (monotone in length, no sqrt
  // rounding in the comparisons).
  std::vector<char> chosen(n, 0);
  std::vector<double> key2(n);
  std::vector<int> from(n, 0);
  chosen[0] = 1;
  for (int v = 1; v < n; ++v)
    key2[v] = (data.values().row(0) - data.values().row(v)).squaredNorm();

  auto edge_of = [&](int v) {
    return std::make_pair(std::min(v, from[v]), std::max(v, from[v]));
  };

  for (int step = 1; step < n; ++step) {
    int best = -1;
    for (int v = 1; v < n; ++v) {
      if (chosen[v]) continue;
      if (best < 0 || key2[v] < key2[best] ||
          (key2[v] == key2[best] && edge_of(v) < edge_of(best)))
        best = v;
    }
    tree.edges.push_back(edge_of(best));
    tree.lengths.push_back(std::sqrt(key2[best]));
    chosen[best] = 1;
    for (int w = 1; w < n; ++w) {
      if (chosen[w]) continue;
      const double d2 =
          (data.values().row(best) - data.values().row(w)).squaredNorm();
      const std::pair<int, int> cand{std::min(best, w), std::max(best, w)};
      if (d2 < key2[w] || (d2 == key2[w] && cand < edge_of(w))) {
        key2[w] = d2;
        from[w] = best;
      }
    }
  }
  return tree;
}

namespace {

// Components after removing the `remove` longest edges (ties resolved
// toward the earlier insertion index).
Partition cut_longest(const WeightedTree& tree, int remove) {
  const int n = tree.n;
  const int m = static_cast<int>(tree.edges.size());

  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return tree.lengths[a] > tree.lengths[b];
  });

  std::vector<char> removed(m, 0);
  for (int r = 0; r < remove; ++r) removed[order[r]] = 1;

  std::vector<int> root(n);
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](int x) {
    while (root[x] != x) {
      root[x] = root[root[x]];
      x = root[x];
    }
    return x;
  };
  for (int e = 0; e < m; ++e) {
    if (removed[e]) continue;
    const int a = find(tree.edges[e].first);
    const int b = find(tree.edges[e].second);
    if (a != b) root[a] = b;
  }

  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = find(i) + 1;
  return Partition(std::move(labels));
}

}  // namespace

Partition mst_cut(const WeightedTree& tree, int k) {
  if (tree.n < 2 || static_cast<int>(tree.edges.size()) != tree.n - 1)
    throw std::invalid_argument("mst_cut: malformed tree");
  if (k < 1 || k > tree.n)
    throw std::invalid_argument("mst_cut: K out of range");
  return cut_longest(tree, k - 1);
}

Partition mst_cut_fraction(const WeightedTree& tree, double q) {
  if (tree.n < 2 || static_cast<int>(tree.edges.size()) != tree.n - 1)
    throw std::invalid_argument("mst_cut_fraction: malformed tree");
  if (!(q >= 0.0) || !(q <= 1.0))
    throw std::invalid_argument("mst_cut_fraction: q outside [0,1]");
  const int remove = std::clamp(
      static_cast<int>(std::floor(q * (tree.n - 1))), 0, tree.n - 1);
  return cut_longest(tree, remove);
}

}  // namespace spanforest
