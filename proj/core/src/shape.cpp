#include "ngr/shape.hpp"

#include <cmath>
#include <numbers>

namespace ngr {

GrassmannPoint<Complex> kads_to_grassmann(const KAds& shape) {
  const Index k = shape.size();
  if (k <= 2) throw Error(ErrorKind::degenerate_input, "a k-ad needs k > 2 landmarks");
  if (!shape.points.allFinite()) throw Error(ErrorKind::degenerate_input, "landmarks must be finite");
  Mat<Complex> z(k - 1, 1);
  for (Index j = 1; j < k; ++j)
    z(j - 1, 0) = Complex(shape.points(j, 0) - shape.points(0, 0), shape.points(j, 1) - shape.points(0, 1));
  const double norm = z.norm();
  if (!(norm > 0.0)) throw Error(ErrorKind::degenerate_input, "degenerate shape: all landmarks coincide");
  return GrassmannPoint<Complex>::from_orthonormal(z / norm);
}

double shape_distance(const KAds& a, const KAds& b) {
  if (a.size() != b.size())
    throw_shape("shape_distance: landmark counts differ (" + std::to_string(a.size()) + " vs " +
                std::to_string(b.size()) + ")");
  return geodesic_distance(kads_to_grassmann(a), kads_to_grassmann(b));
}

KAds similarity_transform(const KAds& shape, double scale, double angle, double tx, double ty) {
  Eigen::Matrix2d rot;
  rot << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  KAds out;
  out.points = (scale * shape.points * rot.transpose()).rowwise() + Eigen::RowVector2d(tx, ty);
  return out;
}

LabeledShapes generate_shape_families(const ShapeFamilyConfig& config) {
  if (config.landmarks <= 2) throw Error(ErrorKind::usage, "shape families need more than two landmarks");
  if (config.per_class < 1) throw Error(ErrorKind::usage, "shape families need at least one shape per class");
  Rng rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Index k = config.landmarks;
  constexpr double kTwoPi = 2.0 * std::numbers::pi;

  LabeledShapes out;
  for (Index s = 0; s < 2 * config.per_class; ++s) {
    const int label = static_cast<int>(s % 2);
    // Low-order radial harmonics 2..4, identical in law for both classes.
    double cos_amp[3], sin_amp[3];
    for (int h = 0; h < 3; ++h) {
      cos_amp[h] = config.nuisance * normal(rng);
      sin_amp[h] = config.nuisance * normal(rng);
    }
    const double aspect = 0.6 * std::exp(0.1 * normal(rng));
    const double dent_center = 0.5 * std::numbers::pi + 0.1 * normal(rng);

    KAds shape;
    shape.points.resize(k, 2);
    for (Index j = 0; j < k; ++j) {
      const double t = kTwoPi * static_cast<double>(j) / static_cast<double>(k);
      double r = 1.0;
      for (int h = 0; h < 3; ++h) r += cos_amp[h] * std::cos((h + 2) * t) + sin_amp[h] * std::sin((h + 2) * t);
      double x = r * std::cos(t);
      double y = aspect * r * std::sin(t);
      if (label == 1) {
        const double dt = std::remainder(t - dent_center, kTwoPi);
        y -= config.signal * std::exp(-dt * dt / 0.18);
      }
      shape.points(j, 0) = x + config.noise * normal(rng);
      shape.points(j, 1) = y + config.noise * normal(rng);
    }
    const double scale = std::exp(normal(rng));
    const double angle = kTwoPi * unit(rng);
    const double tx = 100.0 * (2.0 * unit(rng) - 1.0);
    const double ty = 100.0 * (2.0 * unit(rng) - 1.0);
    out.shapes.push_back(similarity_transform(shape, scale, angle, tx, ty));
    out.labels.push_back(label);
  }
  return out;
}

}  // namespace ngr
