#pragma once
// Seeded synthetic data generators for the reference experiments:
// concentric rings and two-component Gaussian/t mixtures.

#include <Eigen/Dense>

#include <vector>

#include "spanforest/core.hpp"
#include "spanforest/randkit.hpp"

namespace spanforest {

struct GeneratedData {
  Dataset data;
  Partition truth;
};

enum class MixtureKind { gaussian, student_t };

// Generation request as parsed by the CLI.
struct GenSpec {
  enum class Kind { rings, gauss_mix, t_mix };
  Kind kind = Kind::rings;
  // rings
  int n_per_ring = 100;
  std::vector<double> radii = {0.2, 1.0, 2.0};
  double noise_sd = 0.05;
  // mixtures
  int n = 400;
  double b = 4.0;
  double df = 5.0;
};

// Concentric rings in R^2: per ring, n_per_ring points at uniform angles
// and the ring's radius, plus isotropic Gaussian noise with the given sd.
// Truth labels follow ring order.
GeneratedData gen_rings(int n_per_ring, const std::vector<double>& radii,
                        double noise_sd, Rng& rng);

// Two-component mixture with means (0,0) and (b,b) and i.i.d.
// Bernoulli(1/2) membership. Components are N(mu, I_2) or independent
// per-coordinate t_df shifted by mu.
GeneratedData gen_mixture(int n, double b, MixtureKind kind, double df,
                          Rng& rng);

// Gaussian mixture with the given component means (identity covariances)
// and uniform membership; used by the eigenvector-agreement experiment.
GeneratedData gen_gaussian_mixture(int n,
                                   const std::vector<Eigen::RowVector2d>& means,
                                   Rng& rng);

// Dispatch on a GenSpec.
GeneratedData generate(const GenSpec& spec, Rng& rng);

}  // namespace spanforest
