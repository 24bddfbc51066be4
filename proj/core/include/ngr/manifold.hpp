#pragma once

// Grassmann and Stiefel geometry over the real and complex fields.
//
// A point of Gr(p, n) is stored as an n x p matrix with orthonormal columns.
// Throughout, "transpose" means the adjoint, so one code path serves both
// fields. All routines are pure; points and tangent vectors are immutable.

#include <span>
#include <vector>

#include "ngr/common.hpp"

namespace ngr {

template <FieldScalar S>
class GrassmannPoint {
 public:
  /// Adopts `basis` as-is after checking orthonormality to `tol.orthonormality`.
  static GrassmannPoint from_orthonormal(Mat<S> basis, const Tolerances& tol = {});

  const Mat<S>& basis() const noexcept { return basis_; }
  Index ambient_dim() const noexcept { return basis_.rows(); }
  Index dim() const noexcept { return basis_.cols(); }

  /// Orthogonal projector X X^H.
  Mat<S> projector() const { return basis_ * basis_.adjoint(); }

 private:
  explicit GrassmannPoint(Mat<S> basis) : basis_(std::move(basis)) {}

  Mat<S> basis_;
};

/// Horizontal tangent vector at `base`: base^H * mat = 0.
template <FieldScalar S>
class TangentVector {
 public:
  static TangentVector make(GrassmannPoint<S> base, Mat<S> mat, const Tolerances& tol = {});

  const GrassmannPoint<S>& base() const noexcept { return base_; }
  const Mat<S>& mat() const noexcept { return mat_; }
  double norm() const { return mat_.norm(); }

 private:
  TangentVector(GrassmannPoint<S> base, Mat<S> mat) : base_(std::move(base)), mat_(std::move(mat)) {}

  GrassmannPoint<S> base_;
  Mat<S> mat_;
};

/// Principal angles, ascending, each in [0, pi/2].
struct PrincipalAngles {
  RealVec angles;

  Index size() const noexcept { return angles.size(); }
  double max() const { return angles.size() ? angles(angles.size() - 1) : 0.0; }
};

/// Thin QR with the R factor normalized to a nonnegative real diagonal, so
/// each column space has one deterministic representative.
template <FieldScalar S>
GrassmannPoint<S> orthonormalize(const Mat<S>& m, const Tolerances& tol = {});

/// Angles from cosines (singular values of X^H Y) where they are well
/// conditioned and from sines (singular values of Y - X X^H Y) near zero.
template <FieldScalar S>
PrincipalAngles principal_angles(const GrassmannPoint<S>& x, const GrassmannPoint<S>& y);

/// sqrt(sum theta_i^2).
template <FieldScalar S>
double geodesic_distance(const GrassmannPoint<S>& x, const GrassmannPoint<S>& y);

/// sqrt(sum sin^2 theta_i), evaluated as ||(I - X X^H) Y||_F.
template <FieldScalar S>
double projection_distance(const GrassmannPoint<S>& x, const GrassmannPoint<S>& y);

/// ||X X^H - Y Y^H||_F / sqrt(2); independent route to projection_distance.
template <FieldScalar S>
double projection_distance_by_projectors(const GrassmannPoint<S>& x, const GrassmannPoint<S>& y);

enum class Metric { geodesic, projection };

std::string_view to_string(Metric m);
Metric parse_metric(std::string_view s);

template <FieldScalar S>
double distance(const GrassmannPoint<S>& x, const GrassmannPoint<S>& y, Metric metric);

/// Symmetric N x N matrix of pairwise distances with a zero diagonal.
template <FieldScalar S>
RealMat distance_matrix(std::span<const GrassmannPoint<S>> points, Metric metric);

/// True when every principal angle is below `tol.same_point_angle`.
template <FieldScalar S>
bool same_point(const GrassmannPoint<S>& x, const GrassmannPoint<S>& y, const Tolerances& tol = {});

/// span(X V cos(S) + U sin(S)) for the compact SVD H = U S V^H.
template <FieldScalar S>
GrassmannPoint<S> exp_map(const GrassmannPoint<S>& x, const Mat<S>& h, const Tolerances& tol = {});

template <FieldScalar S>
GrassmannPoint<S> exp_map(const TangentVector<S>& v, const Tolerances& tol = {}) {
  return exp_map(v.base(), v.mat(), tol);
}

/// Inverse of exp_map inside the injectivity radius. Throws cut_locus when
/// the largest principal angle is within `tol.cut_locus` of pi/2.
template <FieldScalar S>
TangentVector<S> log_map(const GrassmannPoint<S>& x, const GrassmannPoint<S>& y,
                         const Tolerances& tol = {});

/// (I - X X^H) M.
template <FieldScalar S>
TangentVector<S> tangent_project(const GrassmannPoint<S>& x, const Mat<S>& m);

/// Orthonormalized i.i.d. Gaussian matrix; Haar distributed on St(p, n).
template <FieldScalar S>
GrassmannPoint<S> sample_stiefel_uniform(Index n, Index p, Rng& rng);

/// Gaussian matrix projected onto the horizontal space at `x`, scaled to
/// unit Frobenius norm.
template <FieldScalar S>
TangentVector<S> random_unit_tangent(const GrassmannPoint<S>& x, Rng& rng);

struct KarcherOptions {
  double tol = 1e-9;  // on the norm of the mean log (Frechet gradient)
  int max_iter = 200;
};

/// Karcher iteration mu <- Exp_mu(t mean_i Log_mu(X_i)) started at the
/// extrinsic mean (dominant eigenspace of sum X_i X_i^H); t is halved until
/// the Frechet function decreases, so spread-out data cannot make it
/// oscillate. Below the resolution of the Frechet function plain unit steps
/// are taken while the gradient keeps shrinking.
/// Throws ConvergenceErrorWith<GrassmannPoint<S>> after max_iter.
template <FieldScalar S>
GrassmannPoint<S> frechet_mean(std::span<const GrassmannPoint<S>> points,
                               const KarcherOptions& opts = {}, const Tolerances& tol = {});

/// (1/N) sum d_g^2(X_i, mean).
template <FieldScalar S>
double frechet_variance(std::span<const GrassmannPoint<S>> points, const GrassmannPoint<S>& mean);

/// Orthonormal basis of the complement of span(X): n x (n - p).
template <FieldScalar S>
Mat<S> orthogonal_complement(const GrassmannPoint<S>& x);

}  // namespace ngr
