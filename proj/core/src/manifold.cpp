#include "ngr/manifold.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <vector>

namespace ngr {

namespace {

template <FieldScalar S>
double orthonormality_defect(const Mat<S>& q) {
  const Index p = q.cols();
  return (q.adjoint() * q - Mat<S>::Identity(p, p)).cwiseAbs().maxCoeff();
}

// Singular values in descending order.
template <FieldScalar S>
RealVec singular_values(const Mat<S>& m) {
  if (m.cols() == 1) return RealVec::Constant(1, m.norm());
  return Eigen::JacobiSVD<Mat<S>>(m).singularValues();
}

template <FieldScalar S>
void check_same_shape(const GrassmannPoint<S>& x, const GrassmannPoint<S>& y) {
  if (x.ambient_dim() != y.ambient_dim() || x.dim() != y.dim())
    throw_shape("points live on different Grassmannians: Gr(" + std::to_string(x.dim()) + "," +
                std::to_string(x.ambient_dim()) + ") vs Gr(" + std::to_string(y.dim()) + "," +
                std::to_string(y.ambient_dim()) + ")");
}

}  // namespace

template <FieldScalar S>
GrassmannPoint<S> GrassmannPoint<S>::from_orthonormal(Mat<S> basis, const Tolerances& tol) {
  if (basis.cols() < 1 || basis.rows() < basis.cols())
    throw_shape("basis must be n x p with 1 <= p <= n");
  if (!basis.allFinite())
    throw Error(ErrorKind::degenerate_input, "basis has non-finite entries");
  const double defect = orthonormality_defect(basis);
  if (defect > tol.orthonormality)
    throw Error(ErrorKind::degenerate_input,
                "basis columns are not orthonormal (defect " + std::to_string(defect) + ")");
  return GrassmannPoint(std::move(basis));
}

template <FieldScalar S>
TangentVector<S> TangentVector<S>::make(GrassmannPoint<S> base, Mat<S> mat, const Tolerances& tol) {
  if (mat.rows() != base.ambient_dim() || mat.cols() != base.dim())
    throw_shape("tangent matrix shape does not match its base point");
  const double defect = (base.basis().adjoint() * mat).norm();
  if (defect > tol.tangent * std::max(1.0, mat.norm()))
    throw Error(ErrorKind::invalid_tangent,
                "matrix is not horizontal at its base point (|X^H H| = " + std::to_string(defect) + ")");
  return TangentVector(std::move(base), std::move(mat));
}

template <FieldScalar S>
GrassmannPoint<S> orthonormalize(const Mat<S>& m, const Tolerances& tol) {
  const Index n = m.rows();
  const Index p = m.cols();
  if (p < 1 || n < p) throw_shape("orthonormalize expects an n x p matrix with 1 <= p <= n");
  if (!m.allFinite()) throw Error(ErrorKind::degenerate_input, "matrix has non-finite entries");

  Eigen::HouseholderQR<Mat<S>> qr(m);
  const Mat<S> r = qr.matrixQR().topRows(p).template triangularView<Eigen::Upper>();
  const RealVec sv = singular_values<S>(r);
  if (!(sv(0) > 0.0) || sv(p - 1) < tol.rank * sv(0))
    throw Error(ErrorKind::degenerate_input, "matrix is rank deficient");

  Mat<S> q = qr.householderQ() * Mat<S>::Identity(n, p);
  for (Index j = 0; j < p; ++j) {
    const S d = r(j, j);
    const double mag = std::abs(d);
    if (mag > 0.0) q.col(j) *= d / mag;
  }
  return GrassmannPoint<S>::from_orthonormal(std::move(q), tol);
}

template <FieldScalar S>
PrincipalAngles principal_angles(const GrassmannPoint<S>& x, const GrassmannPoint<S>& y) {
  check_same_shape(x, y);
  // Identical bases: report exact zeros rather than rounding noise.
  if (x.basis() == y.basis()) return PrincipalAngles{RealVec::Zero(x.dim())};
  const Mat<S> c = x.basis().adjoint() * y.basis();
  const Mat<S> residual = y.basis() - x.basis() * c;
  const RealVec cosines = singular_values<S>(c);       // descending
  const RealVec sines = singular_values<S>(residual);  // descending
  const Index p = x.dim();

  PrincipalAngles out{RealVec(p)};
  for (Index i = 0; i < p; ++i) {
    const double cs = std::clamp(cosines(i), 0.0, 1.0);
    const double sn = std::clamp(sines(p - 1 - i), 0.0, 1.0);
    // arcsin is well conditioned below pi/4, arccos above.
    out.angles(i) = (cs * cs >= 0.5) ? std::asin(sn) : std::acos(cs);
  }
  std::sort(out.angles.begin(), out.angles.end());
  return out;
}

template <FieldScalar S>
double geodesic_distance(const GrassmannPoint<S>& x, const GrassmannPoint<S>& y) {
  return principal_angles(x, y).angles.norm();
}

template <FieldScalar S>
double projection_distance(const GrassmannPoint<S>& x, const GrassmannPoint<S>& y) {
  check_same_shape(x, y);
  if (x.basis() == y.basis()) return 0.0;
  return (y.basis() - x.basis() * (x.basis().adjoint() * y.basis())).norm();
}

template <FieldScalar S>
double projection_distance_by_projectors(const GrassmannPoint<S>& x, const GrassmannPoint<S>& y) {
  check_same_shape(x, y);
  return (x.projector() - y.projector()).norm() / std::numbers::sqrt2;
}

std::string_view to_string(Metric m) { return m == Metric::geodesic ? "geodesic" : "projection"; }

Metric parse_metric(std::string_view s) {
  if (s == "geodesic") return Metric::geodesic;
  if (s == "projection") return Metric::projection;
  throw Error(ErrorKind::usage, "unknown metric '" + std::string(s) + "' (expected geodesic|projection)");
}

template <FieldScalar S>
double distance(const GrassmannPoint<S>& x, const GrassmannPoint<S>& y, Metric metric) {
  return metric == Metric::geodesic ? geodesic_distance(x, y) : projection_distance(x, y);
}

template <FieldScalar S>
RealMat distance_matrix(std::span<const GrassmannPoint<S>> points, Metric metric) {
  const auto n = static_cast<Index>(points.size());
  RealMat d = RealMat::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = distance(points[i], points[j], metric);
  return d;
}

template <FieldScalar S>
bool same_point(const GrassmannPoint<S>& x, const GrassmannPoint<S>& y, const Tolerances& tol) {
  return principal_angles(x, y).max() < tol.same_point_angle;
}

template <FieldScalar S>
GrassmannPoint<S> exp_map(const GrassmannPoint<S>& x, const Mat<S>& h, const Tolerances& tol) {
  if (h.rows() != x.ambient_dim() || h.cols() != x.dim())
    throw_shape("tangent matrix shape does not match the base point");
  const double defect = (x.basis().adjoint() * h).norm();
  if (defect > tol.exp_tangent * std::max(1.0, h.norm()))
    throw Error(ErrorKind::invalid_tangent,
                "exp_map: H is not tangent at X (|X^H H| = " + std::to_string(defect) + ")");
  if (h.norm() == 0.0) return x;

  Eigen::JacobiSVD<Mat<S>> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVec& sigma = svd.singularValues();
  const Mat<S> cos_s = sigma.array().cos().matrix().template cast<S>().asDiagonal();
  const Mat<S> sin_s = sigma.array().sin().matrix().template cast<S>().asDiagonal();
  const Mat<S> y = x.basis() * svd.matrixV() * cos_s + svd.matrixU() * sin_s;
  return orthonormalize<S>(y, tol);
}

template <FieldScalar S>
TangentVector<S> log_map(const GrassmannPoint<S>& x, const GrassmannPoint<S>& y, const Tolerances& tol) {
  check_same_shape(x, y);
  if (x.basis() == y.basis()) return TangentVector<S>::make(x, Mat<S>::Zero(x.ambient_dim(), x.dim()), tol);
  const Mat<S> c = x.basis().adjoint() * y.basis();
  const RealVec cosines = singular_values<S>(c);
  if (cosines(cosines.size() - 1) < std::sin(tol.cut_locus))
    throw Error(ErrorKind::cut_locus, "log_map: a principal angle is at pi/2 (cut locus)");

  const Mat<S> residual = y.basis() - x.basis() * c;
  const Mat<S> m = residual * c.partialPivLu().inverse();
  Eigen::JacobiSVD<Mat<S>> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Mat<S> theta = svd.singularValues().array().atan().matrix().template cast<S>().asDiagonal();
  Mat<S> h = svd.matrixU() * theta * svd.matrixV().adjoint();
  h -= x.basis() * (x.basis().adjoint() * h);
  return TangentVector<S>::make(x, std::move(h), tol);
}

template <FieldScalar S>
TangentVector<S> tangent_project(const GrassmannPoint<S>& x, const Mat<S>& m) {
  if (m.rows() != x.ambient_dim() || m.cols() != x.dim())
    throw_shape("tangent_project: matrix shape does not match the base point");
  Mat<S> h = m - x.basis() * (x.basis().adjoint() * m);
  return TangentVector<S>::make(x, std::move(h));
}

template <FieldScalar S>
GrassmannPoint<S> sample_stiefel_uniform(Index n, Index p, Rng& rng) {
  if (p < 1 || p > n) throw_shape("sample_stiefel_uniform requires 1 <= p <= n");
  for (;;) {
    try {
      return orthonormalize<S>(gaussian_matrix<S>(n, p, rng));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::degenerate_input) throw;
    }
  }
}

template <FieldScalar S>
TangentVector<S> random_unit_tangent(const GrassmannPoint<S>& x, Rng& rng) {
  const Mat<S> g = gaussian_matrix<S>(x.ambient_dim(), x.dim(), rng);
  Mat<S> h = g - x.basis() * (x.basis().adjoint() * g);
  const double norm = h.norm();
  if (norm > 0.0) h /= norm;
  return TangentVector<S>::make(x, std::move(h));
}

template <FieldScalar S>
GrassmannPoint<S> frechet_mean(std::span<const GrassmannPoint<S>> points, const KarcherOptions& opts,
                               const Tolerances& tol) {
  if (points.empty()) throw Error(ErrorKind::degenerate_input, "frechet_mean of an empty set");
  const Index n = points.front().ambient_dim();
  const Index p = points.front().dim();
  Mat<S> scatter = Mat<S>::Zero(n, n);
  for (const auto& x : points) {
    check_same_shape(points.front(), x);
    scatter += x.basis() * x.basis().adjoint();
  }
  Eigen::SelfAdjointEigenSolver<Mat<S>> es(scatter);
  GrassmannPoint<S> mu = orthonormalize<S>(es.eigenvectors().rightCols(p), tol);
  if (points.size() == 1) return points.front();
  if (std::all_of(points.begin(), points.end(), [&](const auto& x) { return x.basis() == points.front().basis(); }))
    return points.front();

  const double inv_n = 1.0 / static_cast<double>(points.size());
  double f = frechet_variance(points, mu);
  double last_unit_g2 = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    Mat<S> grad = Mat<S>::Zero(n, p);
    for (std::size_t i = 0; i < points.size(); ++i) {
      try {
        grad += log_map(mu, points[i], tol).mat();
      } catch (const Error& e) {
        throw e.with_index(i);
      }
    }
    grad *= inv_n;
    const double g2 = grad.squaredNorm();
    if (std::sqrt(g2) <= opts.tol) return mu;
    // Once the predicted decrease is below the resolution of F the line
    // search only sees rounding noise. The plain unit step still contracts
    // the gradient near the minimum; take it while the gradient shrinks.
    if (g2 <= 1e-9 * f) {
      if (!(g2 < last_unit_g2)) return mu;
      last_unit_g2 = g2;
      mu = exp_map(mu, grad, tol);
      f = frechet_variance(points, mu);
      continue;
    }
    // Armijo on F = variance / 2, whose gradient is -grad. Spread-out data
    // flatten F, so a successful unit step is extended while F keeps falling.
    bool moved = false;
    for (double t = 1.0; t > 1e-10; t *= 0.5) {
      GrassmannPoint<S> trial = exp_map(mu, Mat<S>(t * grad), tol);
      double f_trial = frechet_variance(points, trial);
      if (0.5 * f_trial <= 0.5 * f - 1e-4 * t * g2) {
        for (double longer = 2.0 * t; t == 1.0 && longer <= 8.0; longer *= 2.0) {
          GrassmannPoint<S> ext = exp_map(mu, Mat<S>(longer * grad), tol);
          const double f_ext = frechet_variance(points, ext);
          if (!(f_ext < f_trial)) break;
          trial = std::move(ext);
          f_trial = f_ext;
        }
        mu = std::move(trial);
        f = f_trial;
        moved = true;
        break;
      }
    }
    if (!moved) {
      if (!(g2 < last_unit_g2)) return mu;
      last_unit_g2 = g2;
      mu = exp_map(mu, grad, tol);
      f = frechet_variance(points, mu);
    }
  }
  throw ConvergenceErrorWith<GrassmannPoint<S>>(
      "frechet_mean did not converge in " + std::to_string(opts.max_iter) + " iterations", mu);
}

template <FieldScalar S>
double frechet_variance(std::span<const GrassmannPoint<S>> points, const GrassmannPoint<S>& mean) {
  std::vector<double> sq(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = geodesic_distance(points[i], mean);
    sq[i] = d * d;
  }
  return pairwise_sum(sq) / static_cast<double>(points.size());
}

template <FieldScalar S>
Mat<S> orthogonal_complement(const GrassmannPoint<S>& x) {
  const Index n = x.ambient_dim();
  const Index p = x.dim();
  Eigen::HouseholderQR<Mat<S>> qr(x.basis());
  const Mat<S> q = qr.householderQ() * Mat<S>::Identity(n, n);
  return q.rightCols(n - p);
}

#define NGR_INSTANTIATE(S)                                                                          \
  template class GrassmannPoint<S>;                                                                 \
  template class TangentVector<S>;                                                                  \
  template GrassmannPoint<S> orthonormalize<S>(const Mat<S>&, const Tolerances&);                   \
  template PrincipalAngles principal_angles<S>(const GrassmannPoint<S>&, const GrassmannPoint<S>&); \
  template double geodesic_distance<S>(const GrassmannPoint<S>&, const GrassmannPoint<S>&);         \
  template double projection_distance<S>(const GrassmannPoint<S>&, const GrassmannPoint<S>&);       \
  template double projection_distance_by_projectors<S>(const GrassmannPoint<S>&,                    \
                                                       const GrassmannPoint<S>&);                   \
  template double distance<S>(const GrassmannPoint<S>&, const GrassmannPoint<S>&, Metric);         \
  template RealMat distance_matrix<S>(std::span<const GrassmannPoint<S>>, Metric);                  \
  template bool same_point<S>(const GrassmannPoint<S>&, const GrassmannPoint<S>&, const Tolerances&); \
  template GrassmannPoint<S> exp_map<S>(const GrassmannPoint<S>&, const Mat<S>&, const Tolerances&); \
  template TangentVector<S> log_map<S>(const GrassmannPoint<S>&, const GrassmannPoint<S>&,          \
                                       const Tolerances&);                                          \
  template TangentVector<S> tangent_project<S>(const GrassmannPoint<S>&, const Mat<S>&);            \
  template GrassmannPoint<S> sample_stiefel_uniform<S>(Index, Index, Rng&);                         \
  template TangentVector<S> random_unit_tangent<S>(const GrassmannPoint<S>&, Rng&);                 \
  template GrassmannPoint<S> frechet_mean<S>(std::span<const GrassmannPoint<S>>,                    \
                                             const KarcherOptions&, const Tolerances&);             \
  template double frechet_variance<S>(std::span<const GrassmannPoint<S>>, const GrassmannPoint<S>&); \
  template Mat<S> orthogonal_complement<S>(const GrassmannPoint<S>&);

NGR_INSTANTIATE(double)
NGR_INSTANTIATE(Complex)

#undef NGR_INSTANTIATE

}  // namespace ngr
