#include "spanforest/randkit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace spanforest {

namespace {

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

// SplitMix64 output function; also used to expand seeds into state.
inline std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

// ---------------------------------------------------------------------------
// Rng (xoshiro256++)
// ---------------------------------------------------------------------------

Rng::Rng(std::uint64_t seed) {
  std::uint64_t x = seed;
  for (auto& w : s_) w = splitmix64(x);
  // All-zero state is the one forbidden point of xoshiro.
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

Rng Rng::for_stream(std::uint64_t seed, std::uint64_t stream) {
  // Mix the stream id through SplitMix64 before combining so that nearby
  // ids give unrelated states.
  std::uint64_t x = stream;
  const std::uint64_t mixed = splitmix64(x);
  return Rng(seed ^ (mixed + 0x9e3779b97f4a7c15ULL));
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double a, double b) { return a + (b - a) * uniform01(); }

std::uint64_t Rng::uniform_int(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_int: zero bound");
  const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % bound;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % bound;
}

double Rng::normal() {
  if (have_cached_normal_) {
    have_cached_normal_ = false;
    return cached_normal_;
  }
  double v1, v2, s;
  do {
    v1 = 2.0 * uniform01() - 1.0;
    v2 = 2.0 * uniform01() - 1.0;
    s = v1 * v1 + v2 * v2;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  cached_normal_ = v2 * f;
  have_cached_normal_ = true;
  return v1 * f;
}

double Rng::exponential(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate <= 0");
  return -std::log(1.0 - uniform01()) / rate;
}

double Rng::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw std::invalid_argument("gamma: shape and rate must be positive");
  if (shape < 1.0) {
    // Boost: G(a) = G(a+1) * U^(1/a).
    const double u = 1.0 - uniform01();  // (0,1], keeps the draw positive
    return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
  }
  // Marsaglia-Tsang squeeze.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
      return d * v / rate;
  }
}

double Rng::chi_squared(double df) { return gamma(0.5 * df, 0.5); }

double Rng::student_t(double df) {
  if (!(df >= 1.0)) throw std::invalid_argument("student_t: df < 1");
  return normal() / std::sqrt(chi_squared(df) / df);
}

// ---------------------------------------------------------------------------
// GIG sampling
// ---------------------------------------------------------------------------

GigTelemetry& gig_telemetry() {
  thread_local GigTelemetry telemetry;
  return telemetry;
}

void reset_gig_telemetry() { gig_telemetry() = GigTelemetry{}; }

namespace {

constexpr std::uint64_t kGigProposalBudget = 1000000;

// Mode of the standardized density z^(lam-1) exp(-(omega/2)(z + 1/z)),
// written to avoid cancellation on both branches.
double gig_mode(double lam, double omega) {
  if (lam >= 1.0)
    return (std::sqrt((lam - 1.0) * (lam - 1.0) + omega * omega) + (lam - 1.0)) /
           omega;
  return omega /
         (std::sqrt((1.0 - lam) * (1.0 - lam) + omega * omega) + (1.0 - lam));
}

// Ratio-of-uniforms with mode shift for the standardized two-parameter GIG
// (lam >= 0, omega > 0). The u-bounds solve d/dx [(x-m)^2 f(x)] = 0, a
// cubic with three real roots; the middle and largest roots bracket the
// mode and give the bounding rectangle.
double gig_rou_shift(double lam, double omega, Rng& rng) {
  const double t = 0.5 * (lam - 1.0);
  const double s = 0.25 * omega;
  const double xm = gig_mode(lam, omega);
  const double nc = t * std::log(xm) - s * (xm + 1.0 / xm);  // log sqrt f(xm)

  const double a = -(2.0 * (lam + 1.0) / omega + xm);
  const double b = 2.0 * (lam - 1.0) * xm / omega - 1.0;
  const double c = xm;

  // Viete's trigonometric solution; the discriminant is negative because
  // the cubic provably has three real roots here, so clamp only guards
  // floating-point rounding at degenerate parameters.
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double inner = -q / (2.0 * std::sqrt(-(p * p * p) / 27.0));
  const double fi = std::acos(std::clamp(inner, -1.0, 1.0));
  const double fak = 2.0 * std::sqrt(-p / 3.0);
  const double y1 = fak * std::cos(fi / 3.0) - a / 3.0;  // largest root, > xm
  const double y2 =
      fak * std::cos(fi / 3.0 + 4.0 * std::numbers::pi / 3.0) - a / 3.0;
  // middle root, in (0, xm)

  const double uplus = (y1 - xm) * std::exp(t * std::log(y1) - s * (y1 + 1.0 / y1) - nc);
  const double uminus = (y2 - xm) * std::exp(t * std::log(y2) - s * (y2 + 1.0 / y2) - nc);

  auto& telemetry = gig_telemetry();
  for (std::uint64_t trial = 0; trial < kGigProposalBudget; ++trial) {
    ++telemetry.proposals;
    const double u = rng.uniform(uminus, uplus);
    const double v = rng.uniform01();
    if (v <= 0.0) continue;
    const double x = u / v + xm;
    if (x <= 0.0) continue;
    if (std::log(v) <= t * std::log(x) - s * (x + 1.0 / x) - nc) {
      ++telemetry.accepts;
      return x;
    }
  }
  throw std::runtime_error(
      "sample_gig: rejection budget exceeded (lam=" + std::to_string(lam) +
      ", omega=" + std::to_string(omega) + ")");
}

}  // namespace

double sample_gig(const GigParams& params, Rng& rng) {
  const double psi = params.psi;
  const double chi = params.chi;
  const double lam = params.lam;
  if (!(psi >= 0.0) || !(chi >= 0.0) || !std::isfinite(psi) ||
      !std::isfinite(chi) || !std::isfinite(lam))
    throw std::invalid_argument("sample_gig: invalid parameters");

  if (chi == 0.0) {
    // Gamma(lam, rate psi/2).
    if (!(lam > 0.0) || !(psi > 0.0))
      throw std::invalid_argument(
          "sample_gig: chi=0 requires lam>0 and psi>0");
    return rng.gamma(lam, 0.5 * psi);
  }
  if (psi == 0.0) {
    // Inverse-Gamma(-lam, scale chi/2).
    if (!(lam < 0.0))
      throw std::invalid_argument("sample_gig: psi=0 requires lam<0");
    return sample_inverse_gamma(-lam, 0.5 * chi, rng);
  }

  // Interior case: standardize to GIG(|lam|, omega, omega) and scale back;
  // negative orders use 1/X ~ GIG(-lam) with psi and chi swapped, which is
  // the identity map after standardization.
  const double alpha = std::sqrt(chi / psi);
  const double omega = std::sqrt(psi * chi);
  if (lam >= 0.0) return alpha * gig_rou_shift(lam, omega, rng);
  return alpha / gig_rou_shift(-lam, omega, rng);
}

double sample_inverse_gamma(double shape, double scale, Rng& rng) {
  if (!(shape > 0.0) || !(scale > 0.0))
    throw std::invalid_argument(
        "sample_inverse_gamma: shape and scale must be positive");
  return 1.0 / rng.gamma(shape, scale);
}

// ---------------------------------------------------------------------------
// CRP-forest prior simulation
// ---------------------------------------------------------------------------

AugmentedTree simulate_forest_process(int n, double alpha, Rng& rng) {
  if (n < 1) throw std::invalid_argument("simulate_forest_process: n < 1");
  if (!(alpha > 0.0))
    throw std::invalid_argument("simulate_forest_process: alpha <= 0");

  // Sequential urn over cluster membership: node i joins the cluster of a
  // uniform earlier node with total probability (i-1)/(i-1+alpha), or opens
  // a new cluster with probability alpha/(i-1+alpha).
  std::vector<int> cluster(n + 1, 0);
  int n_clusters = 0;
  for (int i = 1; i <= n; ++i) {
    const double cut = alpha / (static_cast<double>(i - 1) + alpha);
    if (i == 1 || rng.uniform01() < cut) {
      cluster[i] = ++n_clusters;
    } else {
      const int j = 1 + static_cast<int>(rng.uniform_int(
                            static_cast<std::uint64_t>(i - 1)));
      cluster[i] = cluster[j];
    }
  }
  std::vector<std::vector<int>> members(n_clusters + 1);
  for (int i = 1; i <= n; ++i) members[cluster[i]].push_back(i);

  // Given the partition the prior is uniform over each cluster's spanning
  // trees and roots: draw a uniform labeled tree via a random Prufer
  // sequence and hang it off the hub at a uniform root.
  std::vector<int> parent(n + 1, -1);
  for (int k = 1; k <= n_clusters; ++k) {
    const auto& nodes = members[k];
    const int m = static_cast<int>(nodes.size());
    const int root_pos =
        static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(m)));
    if (m == 1) {
      parent[nodes[0]] = 0;
      continue;
    }
    // Decode a uniform Prufer sequence over local labels 0..m-1 with the
    // canonical smallest-leaf rule; a node enters the heap exactly when its
    // degree drops to 1, so entries are never stale.
    std::vector<int> prufer(m - 2);
    for (int& v : prufer)
      v = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(m)));
    std::vector<int> degree(m, 1);
    for (int v : prufer) ++degree[v];
    std::priority_queue<int, std::vector<int>, std::greater<int>> leaves;
    for (int u = 0; u < m; ++u)
      if (degree[u] == 1) leaves.push(u);
    std::vector<std::vector<int>> adj(m);
    for (int v : prufer) {
      const int leaf = leaves.top();
      leaves.pop();
      adj[leaf].push_back(v);
      adj[v].push_back(leaf);
      degree[leaf] = 0;
      if (--degree[v] == 1) leaves.push(v);
    }
    const int a = leaves.top();
    leaves.pop();
    const int b = leaves.top();
    adj[a].push_back(b);
    adj[b].push_back(a);

    // Orient toward the chosen root by BFS.
    std::vector<int> stack = {root_pos};
    std::vector<char> seen(m, 0);
    seen[root_pos] = 1;
    parent[nodes[root_pos]] = 0;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v : adj[u]) {
        if (seen[v]) continue;
        seen[v] = 1;
        parent[nodes[v]] = nodes[u];
        stack.push_back(v);
      }
    }
  }
  return AugmentedTree(std::move(parent));
}

}  // namespace spanforest
