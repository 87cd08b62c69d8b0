#include "spanforest/datagen.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace spanforest {

GeneratedData gen_rings(int n_per_ring, const std::vector<double>& radii,
                        double noise_sd, Rng& rng) {
  if (n_per_ring < 1)
    throw std::invalid_argument("gen_rings: n_per_ring < 1");
  if (radii.empty()) throw std::invalid_argument("gen_rings: no radii");
  for (double r : radii)
    if (!(r > 0.0)) throw std::invalid_argument("gen_rings: radius <= 0");
  if (!(noise_sd >= 0.0))
    throw std::invalid_argument("gen_rings: negative noise sd");

  const int rings = static_cast<int>(radii.size());
  const int n = n_per_ring * rings;
  Eigen::MatrixXd y(n, 2);
  std::vector<int> labels(n);
  int row = 0;
  for (int k = 0; k < rings; ++k) {
    for (int i = 0; i < n_per_ring; ++i, ++row) {
      const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
      y(row, 0) = radii[k] * std::cos(angle) + noise_sd * rng.normal();
      y(row, 1) = radii[k] * std::sin(angle) + noise_sd * rng.normal();
      labels[row] = k + 1;
    }
  }
  return GeneratedData{Dataset(std::move(y)), Partition(std::move(labels))};
}

GeneratedData gen_mixture(int n, double b, MixtureKind kind, double df,
                          Rng& rng) {
  if (n < 2) throw std::invalid_argument("gen_mixture: n < 2");
  if (kind == MixtureKind::student_t && !(df >= 1.0))
    throw std::invalid_argument("gen_mixture: t mixture needs df >= 1");

  Eigen::MatrixXd y(n, 2);
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) {
    const int comp = rng.uniform01() < 0.5 ? 1 : 2;
    const double mu = comp == 1 ? 0.0 : b;
    for (int c = 0; c < 2; ++c) {
      const double draw =
          kind == MixtureKind::gaussian ? rng.normal() : rng.student_t(df);
      y(i, c) = mu + draw;
    }
    labels[i] = comp;
  }
  return GeneratedData{Dataset(std::move(y)), Partition(std::move(labels))};
}

GeneratedData gen_gaussian_mixture(
    int n, const std::vector<Eigen::RowVector2d>& means, Rng& rng) {
  if (n < 2) throw std::invalid_argument("gen_gaussian_mixture: n < 2");
  if (means.empty())
    throw std::invalid_argument("gen_gaussian_mixture: no means");

  Eigen::MatrixXd y(n, 2);
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) {
    const int comp = static_cast<int>(rng.uniform_int(means.size()));
    y(i, 0) = means[comp][0] + rng.normal();
    y(i, 1) = means[comp][1] + rng.normal();
    labels[i] = comp + 1;
  }
  return GeneratedData{Dataset(std::move(y)), Partition(std::move(labels))};
}

GeneratedData generate(const GenSpec& spec, Rng& rng) {
  switch (spec.kind) {
    case GenSpec::Kind::rings:
      return gen_rings(spec.n_per_ring, spec.radii, spec.noise_sd, rng);
    case GenSpec::Kind::gauss_mix:
      return gen_mixture(spec.n, spec.b, MixtureKind::gaussian, spec.df, rng);
    case GenSpec::Kind::t_mix:
      return gen_mixture(spec.n, spec.b, MixtureKind::student_t, spec.df, rng);
  }
  throw std::invalid_argument("generate: unknown kind");
}

}  // namespace spanforest
