#pragma once

// Kendall planar shapes as points of Gr(1, C^(k-1)).

#include <cstdint>
#include <vector>

#include "ngr/manifold.hpp"

namespace ngr {

/// An ordered list of k > 2 planar landmarks, one (x, y) per row.
struct KAds {
  Eigen::Matrix<double, Eigen::Dynamic, 2> points;

  Index size() const noexcept { return points.rows(); }
};

/// Subtracts the first landmark, drops the resulting zero, reads each
/// remaining (x, y) as x + iy and returns the complex line they span.
GrassmannPoint<Complex> kads_to_grassmann(const KAds& shape);

/// Geodesic distance between the images of two k-ads.
double shape_distance(const KAds& a, const KAds& b);

/// s R(theta) x + t applied to every landmark.
KAds similarity_transform(const KAds& shape, double scale, double angle, double tx, double ty);

struct ShapeFamilyConfig {
  Index landmarks = 100;   // k
  Index per_class = 20;    // shapes per family
  double nuisance = 0.15;  // amplitude of class-independent low-order deformations
  double signal = 0.2;     // depth of the class-specific indentation
  double noise = 0.005;    // isotropic landmark jitter
  std::uint64_t seed = 0;
};

struct LabeledShapes {
  std::vector<KAds> shapes;
  std::vector<int> labels;
};

/// Two families of closed contours: label 0 are perturbed ellipses, label 1
/// the same ellipses with an indentation ("beans"). Every shape also gets
/// random low-order deformations shared by both classes, landmark noise and
/// a random similarity transform. Shapes alternate between the classes.
LabeledShapes generate_shape_families(const ShapeFamilyConfig& config);

}  // namespace ngr
