#pragma once
// Seeded random-variate generation. The base generator is xoshiro256++
// seeded through SplitMix64, so identical seeds give identical draw
// sequences on every platform. Distribution samplers are implemented
// here rather than through <random> because the standard library's
// distributions are not portable across implementations.
//
// Generators are not shareable across threads: use one Rng per
// chain/worker, derived from a root seed and a stream id.

#include <array>
#include <cstdint>

#include "spanforest/core.hpp"

namespace spanforest {

class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent stream derived from (seed, stream); used to give each
  // chain, restart, or replicate its own generator.
  static Rng for_stream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  // Uniform on [0,1) with 53 random bits.
  double uniform01();
  double uniform(double a, double b);
  // Uniform integer in [0, bound), unbiased; bound > 0.
  std::uint64_t uniform_int(std::uint64_t bound);

  // Standard normal (Marsaglia polar, one value cached).
  double normal();
  // Exponential with the given rate.
  double exponential(double rate = 1.0);
  // Gamma(shape, rate) via Marsaglia-Tsang, boosted for shape < 1.
  double gamma(double shape, double rate);
  double chi_squared(double df);
  double student_t(double df);

 private:
  std::array<std::uint64_t, 4> s_{};
  double cached_normal_ = 0.0;
  bool have_cached_normal_ = false;
};

// ---------------------------------------------------------------------------
// Generalized Inverse Gaussian
// ---------------------------------------------------------------------------

// Parameters of the GIG density  f(x) ∝ x^(lam-1) exp(-(psi*x + chi/x)/2)
// on x > 0. Valid domains: (psi>0, chi>0, any lam), (chi=0, lam>0, psi>0),
// and (psi=0, lam<0, chi>0).
struct GigParams {
  double psi = 0.0;
  double chi = 0.0;
  double lam = 0.0;
};

// Acceptance telemetry for the GIG rejection sampler (thread-local).
struct GigTelemetry {
  std::uint64_t proposals = 0;
  std::uint64_t accepts = 0;
};
GigTelemetry& gig_telemetry();
void reset_gig_telemetry();

// Draw from the GIG distribution. Boundary domains reduce to Gamma
// (chi=0) and Inverse-Gamma (psi=0); the interior case uses the
// Hormann-Leydold ratio-of-uniforms method with mode shift, which covers
// every valid parameter triple without Bessel-function evaluation. The
// rejection loop aborts with std::runtime_error after 1e6 proposals
// (parameter pathology).
double sample_gig(const GigParams& params, Rng& rng);

// Inverse-Gamma with density ∝ x^(-shape-1) exp(-scale/x); the reciprocal
// of a draw is Gamma(shape, rate=scale).
double sample_inverse_gamma(double shape, double scale, Rng& rng);

// Simulate an augmented tree from the CRP-forest prior: cluster membership
// grows sequentially with the urn weights (join an existing cluster with
// probability n_k/(i-1+alpha), i.e. attach to a uniform earlier node; open
// a new cluster with probability alpha/(i-1+alpha)), and each cluster then
// receives a uniform spanning tree and a uniform root, which is exactly the
// prior's conditional given the partition. Structure only; no data is
// generated.
AugmentedTree simulate_forest_process(int n, double alpha, Rng& rng);

}  // namespace spanforest
