#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "spanforest/core.hpp"
#include "spanforest/posterior.hpp"
#include "spanforest/randkit.hpp"
#include "testutil.hpp"

using namespace spanforest;

namespace {

McmcSample make_sample(std::vector<int> parents, int iteration = 1) {
  McmcSample s{AugmentedTree(std::move(parents)),
               Eigen::VectorXd::Ones(0), 1.0, iteration};
  s.sigma_tilde = Eigen::VectorXd::Ones(s.tree.n());
  return s;
}

// psm of an exact partition: 1 within blocks, 0 across, diagonal 1.
Eigen::MatrixXd block_psm(const std::vector<int>& labels) {
  const int n = static_cast<int>(labels.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = labels[i] == labels[j] ? 1.0 : 0.0;
  return m;
}

}  // namespace

TEST_CASE("coassignment of identical samples is the block matrix") {
  // Partition {1,2}|{3}: nodes 1,2 share a chain, node 3 is its own root.
  std::vector<McmcSample> samples;
  for (int i = 0; i < 5; ++i) samples.push_back(make_sample({-1, 0, 1, 0}, i));

  Eigen::MatrixXd psm = coassignment(samples);
  Eigen::MatrixXd want(3, 3);
  want << 1, 1, 0, 1, 1, 0, 0, 0, 1;
  CHECK((psm - want).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("coassignment averages over samples") {
  std::vector<McmcSample> samples;
  samples.push_back(make_sample({-1, 0, 1}));  // together
  samples.push_back(make_sample({-1, 0, 0}));  // apart
  Eigen::MatrixXd psm = coassignment(samples);
  CHECK(psm(0, 1) == doctest::Approx(0.5));
  CHECK(psm(1, 0) == doctest::Approx(0.5));
  CHECK(psm(0, 0) == doctest::Approx(1.0));
  CHECK(psm(1, 1) == doctest::Approx(1.0));

  CHECK_THROWS_AS(coassignment({}), std::invalid_argument);
}

TEST_CASE("psm is invariant to cluster relabeling within samples") {
  // The same set partition {0,2}|{1} reached through different tree shapes.
  std::vector<McmcSample> a{make_sample({-1, 0, 0, 1})};
  std::vector<McmcSample> b{make_sample({-1, 3, 0, 0})};
  CHECK((coassignment(a) - coassignment(b)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("k_mode selects the modal cluster count, ties toward smaller") {
  std::vector<McmcSample> samples;
  samples.push_back(make_sample({-1, 0, 1, 1}));  // K=1
  samples.push_back(make_sample({-1, 0, 0, 1}));  // K=2
  samples.push_back(make_sample({-1, 0, 0, 2}));  // K=2
  CHECK(k_mode(samples) == 2);

  samples.push_back(make_sample({-1, 0, 0, 0}));  // K=3
  samples.push_back(make_sample({-1, 0, 0, 0}));  // K=3
  // Tie between K=2 and K=3.
  CHECK(k_mode(samples) == 2);

  CHECK_THROWS_AS(k_mode({}), std::invalid_argument);
}

TEST_CASE("accumulator matches the batch coassignment") {
  std::mt19937 gen(404);
  std::vector<McmcSample> samples;
  for (int t = 0; t < 40; ++t) {
    std::vector<int> parent(7, -1);
    for (int i = 1; i <= 6; ++i)
      parent[i] = static_cast<int>(gen() % static_cast<unsigned>(i));
    samples.push_back(make_sample(std::move(parent), t));
  }

  CoassignmentAccumulator acc(6);
  for (const auto& s : samples) acc.add(partition_from_tree(s.tree));
  CHECK(acc.count() == 40);
  CHECK((acc.psm() - coassignment(samples)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(acc.k_mode() == k_mode(samples));

  int total = 0;
  for (const auto& [k, c] : acc.k_counts()) total += c;
  CHECK(total == 40);
}

TEST_CASE("point estimate recovers exact blocks") {
  Eigen::MatrixXd psm = block_psm({1, 1, 2, 2, 2});
  Rng rng(7);
  Partition p = point_estimate(psm, 2, rng);
  CHECK(p.labels() == std::vector<int>{1, 1, 2, 2, 2});
}

TEST_CASE("point estimate with k_hat = 1") {
  Eigen::MatrixXd psm = block_psm({1, 1, 2, 2});
  Rng rng(8);
  Partition p = point_estimate(psm, 1, rng);
  CHECK(p.K() == 1);
}

TEST_CASE("point estimate forces never-coassigned rows into singletons") {
  // Two tight pairs plus a point never co-assigned with anyone.
  Eigen::MatrixXd psm = block_psm({1, 1, 2, 2, 3});
  Rng rng(9);
  Partition p = point_estimate(psm, 3, rng);
  CHECK(p.labels() == std::vector<int>{1, 1, 2, 2, 3});
}

TEST_CASE("point estimate validates k_hat") {
  Eigen::MatrixXd psm = block_psm({1, 1, 2});
  Rng rng(10);
  CHECK_THROWS_AS(point_estimate(psm, 0, rng), std::invalid_argument);
  CHECK_THROWS_AS(point_estimate(psm, 4, rng), std::invalid_argument);
}

TEST_CASE("point estimate recovers random block structures up to n=50") {
  std::mt19937 gen(2025);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 10 + static_cast<int>(gen() % 41);
    const int k = 2 + static_cast<int>(gen() % 4);
    std::vector<int> labels(n);
    // Guarantee every block is occupied, then fill the rest at random.
    for (int c = 0; c < k; ++c) labels[c] = c + 1;
    for (int i = k; i < n; ++i) labels[i] = 1 + static_cast<int>(gen() % k);
    std::shuffle(labels.begin(), labels.end(), gen);

    Rng rng(3000 + rep);
    Partition got = point_estimate(block_psm(labels), k, rng);
    CHECK(hungarian_accuracy(got, Partition(labels)) == doctest::Approx(1.0));
  }
}

TEST_CASE("hungarian accuracy closed cases") {
  Partition truth({1, 1, 2, 2});
  CHECK(hungarian_accuracy(truth, truth) == doctest::Approx(1.0));
  CHECK(hungarian_accuracy(Partition({2, 2, 1, 1}), truth) ==
        doctest::Approx(1.0));
  CHECK(hungarian_accuracy(Partition({1, 1, 1, 2}), truth) ==
        doctest::Approx(0.75));
  CHECK_THROWS_AS(hungarian_accuracy(Partition({1, 2}), truth),
                  std::invalid_argument);
}

TEST_CASE("hungarian accuracy dominates every fixed relabeling") {
  std::mt19937 gen(616);
  for (int rep = 0; rep < 25; ++rep) {
    const int n = 8 + static_cast<int>(gen() % 13);
    const int kt = 2 + static_cast<int>(gen() % 4);
    const int ke = 2 + static_cast<int>(gen() % 4);
    std::vector<int> tl(n), el(n);
    for (int i = 0; i < n; ++i) {
      tl[i] = 1 + static_cast<int>(gen() % kt);
      el[i] = 1 + static_cast<int>(gen() % ke);
    }
    Partition truth(tl), est(el);

    const double got = hungarian_accuracy(est, truth);

    // Brute force: pad the contingency table square and try all column
    // permutations.
    const int dim = std::max(truth.K(), est.K());
    std::vector<std::vector<long long>> table(
        dim, std::vector<long long>(dim, 0));
    for (int i = 0; i < n; ++i) ++table[est.label(i) - 1][truth.label(i) - 1];
    const double best =
        static_cast<double>(testutil::max_assignment_brute_force(table)) / n;
    CHECK(got == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("summarize bundles psm, histogram, mode, and point estimate") {
  std::vector<McmcSample> samples;
  // Three samples: twice {1,2}|{3}, once all together.
  samples.push_back(make_sample({-1, 0, 1, 0}, 1));
  samples.push_back(make_sample({-1, 0, 1, 0}, 2));
  samples.push_back(make_sample({-1, 0, 1, 2}, 3));

  Rng rng(17);
  PosteriorSummary sum = summarize(samples, std::nullopt, rng);
  CHECK(sum.k_mode == 2);
  CHECK(sum.k_hist.at(2) == 2);
  CHECK(sum.k_hist.at(1) == 1);
  CHECK(sum.psm(0, 1) == doctest::Approx(1.0));
  CHECK(sum.psm(0, 2) == doctest::Approx(1.0 / 3.0));
  CHECK(sum.point_estimate.K() == 2);
  CHECK(sum.point_estimate.labels() == std::vector<int>{1, 1, 2});

  Rng rng2(18);
  PosteriorSummary forced = summarize(samples, 1, rng2);
  CHECK(forced.point_estimate.K() == 1);
  CHECK(forced.k_mode == 2);  // mode reported regardless of override
}
