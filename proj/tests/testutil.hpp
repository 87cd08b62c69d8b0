#pragma once
// Shared test oracles: adaptive quadrature on finite/infinite ranges,
// KS and chi-squared goodness-of-fit machinery, set-partition enumeration,
// an independent single-linkage implementation, and brute-force assignment
// matching. Everything here is implemented independently of the library
// under test.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace testutil {

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

namespace detail {

inline double simpson(const std::function<double(double)>& f, double a,
                      double fa, double b, double fb, double m, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_step(const std::function<double(double)>& f, double a,
                            double fa, double b, double fb, double m,
                            double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(f, a, fa, m, fm, lm, flm);
  const double right = simpson(f, m, fm, b, fb, rm, frm);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson on [a, b].
inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-11) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = detail::simpson(f, a, fa, b, fb, m, fm);
  return detail::adaptive_step(f, a, fa, b, fb, m, fm, whole, tol, 48);
}

// Integral over the whole real line via x = tan(t).
inline double integrate_real_line(const std::function<double(double)>& f,
                                  double tol = 1e-11) {
  const double half_pi = 1.5707963267948966;
  auto g = [&f, half_pi](double t) {
    if (std::abs(t) >= half_pi - 1e-12) return 0.0;
    const double c = std::cos(t);
    return f(std::tan(t)) / (c * c);
  };
  return integrate(g, -half_pi, half_pi, tol);
}

// 5-point Gauss-Legendre on [a, b].
inline double gauss5(const std::function<double(double)>& f, double a,
                     double b) {
  static const double xs[5] = {0.0, -0.5384693101056831, 0.5384693101056831,
                               -0.9061798459386640, 0.9061798459386640};
  static const double ws[5] = {0.5688888888888889, 0.4786286704993665,
                               0.4786286704993665, 0.2369268850561891,
                               0.2369268850561891};
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < 5; ++i) acc += ws[i] * f(c + h * xs[i]);
  return acc * h;
}

// Mass of an unnormalized density on (0, inf), integrated in log space
// around a caller-supplied scale point inside the bulk. Valid for
// densities with at least x^(-1/2)-type behavior at 0 (all Gamma / GIG /
// Inverse-Gamma conditionals used in the model). The tolerance is made
// relative to the density's magnitude at the scale point: unnormalized
// conditionals can peak at ~1e20, where an absolute 1e-11 target sits
// below the roundoff floor and adaptive subdivision never terminates.
inline double half_line_mass(const std::function<double(double)>& density,
                             double x_scale, double tol = 1e-11) {
  const double u0 = std::log(x_scale);
  auto g = [&density](double u) { return density(std::exp(u)) * std::exp(u); };
  const double scale = std::max(1.0, std::abs(g(u0)));
  return integrate(g, u0 - 80.0, u0 + 80.0, tol * scale);
}

// Normalized CDF values of an unnormalized half-line density at each of
// the (sorted ascending) sample points, by composite Gauss-5 panels in
// log space.
inline std::vector<double> half_line_cdf(
    const std::function<double(double)>& density, double x_scale,
    const std::vector<double>& sorted_xs) {
  if (sorted_xs.empty()) return {};
  auto g = [&density](double u) { return density(std::exp(u)) * std::exp(u); };
  const double u_lo = std::log(x_scale) - 80.0;
  const double u_hi = std::log(x_scale) + 80.0;
  const double max_panel = (u_hi - u_lo) / 4096.0;

  auto piece = [&](double a, double b) {
    if (b <= a) return 0.0;
    const int panels = 1 + static_cast<int>((b - a) / max_panel);
    double acc = 0.0;
    for (int k = 0; k < panels; ++k)
      acc += gauss5(g, a + (b - a) * k / panels, a + (b - a) * (k + 1) / panels);
    return acc;
  };

  std::vector<double> cdf(sorted_xs.size());
  double acc = piece(u_lo, std::log(sorted_xs.front()));
  cdf[0] = acc;
  for (std::size_t i = 1; i < sorted_xs.size(); ++i) {
    acc += piece(std::log(sorted_xs[i - 1]), std::log(sorted_xs[i]));
    cdf[i] = acc;
  }
  const double total = acc + piece(std::log(sorted_xs.back()), u_hi);
  for (double& v : cdf) v /= total;
  return cdf;
}

// ---------------------------------------------------------------------------
// Goodness-of-fit
// ---------------------------------------------------------------------------

// Kolmogorov-Smirnov statistic for sorted samples against CDF values at
// those samples.
inline double ks_statistic(const std::vector<double>& cdf_at_sorted) {
  const double n = static_cast<double>(cdf_at_sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < cdf_at_sorted.size(); ++i) {
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max({d, std::abs(cdf_at_sorted[i] - lo),
                  std::abs(cdf_at_sorted[i] - hi)});
  }
  return d;
}

// Asymptotic KS p-value with the standard small-sample correction.
inline double ks_pvalue(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  double p = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    p += sign * term;
    sign = -sign;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * p, 0.0, 1.0);
}

// Regularized lower incomplete gamma P(a, x) (series / continued fraction).
inline double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p: bad args");
  if (x == 0.0) return 0.0;
  const double gln = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - gln);
  }
  // Lentz continued fraction for Q(a, x).
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  const double q = std::exp(-x + a * std::log(x) - gln) * h;
  return 1.0 - q;
}

// Upper-tail chi-squared p-value.
inline double chi2_pvalue(double stat, double df) {
  return 1.0 - gamma_p(0.5 * df, 0.5 * stat);
}

// Pearson chi-squared statistic of observed counts against expected
// probabilities (counts and probs aligned; probs must sum to ~1).
inline double chi2_statistic(const std::vector<long>& observed,
                             const std::vector<double>& probs) {
  if (observed.size() != probs.size())
    throw std::invalid_argument("chi2_statistic: size mismatch");
  const double total =
      static_cast<double>(std::accumulate(observed.begin(), observed.end(), 0L));
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double expected = total * probs[i];
    if (expected <= 0.0)
      throw std::invalid_argument("chi2_statistic: zero expected count");
    const double diff = static_cast<double>(observed[i]) - expected;
    stat += diff * diff / expected;
  }
  return stat;
}

// ---------------------------------------------------------------------------
// Enumeration oracles
// ---------------------------------------------------------------------------

// All set partitions of {0..n-1} as label vectors (restricted growth
// strings; labels 1-based, first-occurrence canonical by construction).
inline std::vector<std::vector<int>> set_partitions(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> rgs(n, 1);
  std::function<void(int, int)> rec = [&](int i, int max_used) {
    if (i == n) {
      out.push_back(rgs);
      return;
    }
    for (int lab = 1; lab <= max_used + 1; ++lab) {
      rgs[i] = lab;
      rec(i + 1, std::max(max_used, lab));
    }
  };
  rec(0, 0);
  return out;
}

// Partitions of {0..n-1} into exactly k blocks.
inline std::vector<std::vector<int>> set_partitions_k(int n, int k) {
  std::vector<std::vector<int>> out;
  for (auto& p : set_partitions(n))
    if (*std::max_element(p.begin(), p.end()) == k) out.push_back(p);
  return out;
}

// Agglomerative single-linkage cut at k clusters, O(n^3), on a full
// distance matrix; merge ties resolved toward the smallest cluster-index
// pair.
inline std::vector<int> single_linkage_cut(
    const std::vector<std::vector<double>>& dist, int k) {
  const int n = static_cast<int>(dist.size());
  std::vector<std::vector<int>> clusters(n);
  for (int i = 0; i < n; ++i) clusters[i] = {i};

  while (static_cast<int>(clusters.size()) > k) {
    double best = std::numeric_limits<double>::infinity();
    int ba = -1, bb = -1;
    for (std::size_t a = 0; a < clusters.size(); ++a)
      for (std::size_t b = a + 1; b < clusters.size(); ++b) {
        double link = std::numeric_limits<double>::infinity();
        for (int i : clusters[a])
          for (int j : clusters[b]) link = std::min(link, dist[i][j]);
        if (link < best) {
          best = link;
          ba = static_cast<int>(a);
          bb = static_cast<int>(b);
        }
      }
    clusters[ba].insert(clusters[ba].end(), clusters[bb].begin(),
                        clusters[bb].end());
    clusters.erase(clusters.begin() + bb);
  }

  std::vector<int> labels(n, 0);
  for (std::size_t c = 0; c < clusters.size(); ++c)
    for (int i : clusters[c]) labels[i] = static_cast<int>(c) + 1;
  return labels;
}

// Maximum total overlap over injective assignments of rows to columns of a
// (padded) square table, by brute-force permutation; dim <= 8.
inline long long max_assignment_brute_force(
    const std::vector<std::vector<long long>>& table) {
  const int dim = static_cast<int>(table.size());
  if (dim > 8)
    throw std::invalid_argument("max_assignment_brute_force: too large");
  std::vector<int> perm(dim);
  std::iota(perm.begin(), perm.end(), 0);
  long long best = std::numeric_limits<long long>::min();
  do {
    long long total = 0;
    for (int i = 0; i < dim; ++i) total += table[i][perm[i]];
    best = std::max(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// ---------------------------------------------------------------------------
// Small statistics helpers
// ---------------------------------------------------------------------------

inline double mean(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) /
         static_cast<double>(xs.size());
}

inline double variance(const std::vector<double>& xs) {
  const double m = mean(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return acc / static_cast<double>(xs.size() - 1);
}

inline double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace testutil
