#include "ngr/nested.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace ngr {

namespace {

template <FieldScalar S>
Mat<S> tree_sum(std::vector<Mat<S>>& terms, Index rows, Index cols) {
  if (terms.empty()) return Mat<S>::Zero(rows, cols);
  for (std::size_t stride = 1; stride < terms.size(); stride *= 2)
    for (std::size_t i = 0; i + stride < terms.size(); i += 2 * stride) terms[i] += terms[i + stride];
  return terms.front();
}

template <FieldScalar S>
void check_dataset(std::span<const GrassmannPoint<S>> points, Index n, Index p) {
  for (std::size_t i = 0; i < points.size(); ++i)
    if (points[i].ambient_dim() != n || points[i].dim() != p)
      throw Error(ErrorKind::shape,
                  "sample lives on Gr(" + std::to_string(points[i].dim()) + "," +
                      std::to_string(points[i].ambient_dim()) + "), expected Gr(" + std::to_string(p) + "," +
                      std::to_string(n) + ")",
                  i);
}

// Orthonormal basis Q and triangular factor R of M = Q R. Throws
// degenerate_input when M is rank deficient.
template <FieldScalar S>
std::pair<Mat<S>, Mat<S>> thin_qr(const Mat<S>& m) {
  const GrassmannPoint<S> q = orthonormalize<S>(m);
  Mat<S> r = q.basis().adjoint() * m;
  return {q.basis(), std::move(r)};
}

// theta^2 summed, between span(x) and span(m) for arbitrary full-rank m.
template <FieldScalar S>
double geodesic_sq_to_span(const Mat<S>& x, const Mat<S>& m) {
  if (m.cols() == 1) {
    const double norm = m.norm();
    if (!(norm > 0.0)) throw Error(ErrorKind::degenerate_input, "reconstruction is rank deficient");
    const S c = (x.adjoint() * m)(0, 0);
    const double cs = std::min(1.0, std::abs(c) / norm);
    const double sn = std::min(1.0, (m - x * c).norm() / norm);
    const double theta = cs * cs >= 0.5 ? std::asin(sn) : std::acos(cs);
    return theta * theta;
  }
  const GrassmannPoint<S> y = orthonormalize<S>(m);
  const RealVec angles = principal_angles(GrassmannPoint<S>::from_orthonormal(x), y).angles;
  return angles.squaredNorm();
}

// Central-difference gradient of f at m under df = Re tr(G^H dM).
template <FieldScalar S, class F>
Mat<S> central_difference(const F& f, const Mat<S>& m, double h = 1e-6) {
  Mat<S> g(m.rows(), m.cols());
  Mat<S> probe = m;
  for (Index c = 0; c < m.cols(); ++c)
    for (Index r = 0; r < m.rows(); ++r) {
      const S orig = probe(r, c);
      probe(r, c) = orig + S(h);
      const double fp = f(probe);
      probe(r, c) = orig - S(h);
      const double fm = f(probe);
      double re = (fp - fm) / (2.0 * h);
      if constexpr (std::same_as<S, Complex>) {
        probe(r, c) = orig + Complex(0.0, h);
        const double gp = f(probe);
        probe(r, c) = orig - Complex(0.0, h);
        const double gm = f(probe);
        g(r, c) = Complex(re, (gp - gm) / (2.0 * h));
      } else {
        g(r, c) = re;
      }
      probe(r, c) = orig;
    }
  return g;
}

}  // namespace

// ---------------------------------------------------------------------------
// NestedMap and the embedding / projection pair

template <FieldScalar S>
NestedMap<S> NestedMap<S>::make(Mat<S> a, const Mat<S>& b_tilde, const Tolerances& tol) {
  const Index n = a.rows();
  const Index m = a.cols();
  if (m < 1 || n < m) throw_shape("NestedMap: A must be n x m with 1 <= m <= n");
  if (b_tilde.rows() != n || b_tilde.cols() < 1 || b_tilde.cols() > m)
    throw_shape("NestedMap: B must be n x p with 1 <= p <= m");
  if ((a.adjoint() * a - Mat<S>::Identity(m, m)).cwiseAbs().maxCoeff() > 1e-10)
    throw Error(ErrorKind::degenerate_input, "NestedMap: A does not have orthonormal columns");
  if (!b_tilde.allFinite()) throw Error(ErrorKind::degenerate_input, "NestedMap: B has non-finite entries");
  // An offset already orthogonal to A (a stored model, say) is kept bit for bit.
  const Mat<S> cross = a.adjoint() * b_tilde;
  if (cross.cwiseAbs().maxCoeff() <= tol.orthonormality) return NestedMap(std::move(a), b_tilde);
  Mat<S> b = b_tilde - a * cross;
  return NestedMap(std::move(a), std::move(b));
}

template <FieldScalar S>
NestedMap<S> NestedMap<S>::natural(Index n, Index m, Index p) {
  if (!(1 <= p && p <= m && m <= n)) throw_shape("natural embedding needs 1 <= p <= m <= n");
  return NestedMap(Mat<S>::Identity(n, m), Mat<S>::Zero(n, p));
}

template <FieldScalar S>
GrassmannPoint<S> embed_point(const NestedMap<S>& map, const GrassmannPoint<S>& x) {
  if (x.ambient_dim() != map.reduced_dim() || x.dim() != map.subspace_dim())
    throw_shape("embed_point: point is not on Gr(p, m) of the map");
  return orthonormalize<S>(map.a() * x.basis() + map.b());
}

template <FieldScalar S>
GrassmannPoint<S> project_point(const NestedMap<S>& map, const GrassmannPoint<S>& x) {
  if (x.ambient_dim() != map.ambient_dim() || x.dim() != map.subspace_dim())
    throw_shape("project_point: point is not on Gr(p, n) of the map");
  try {
    return orthonormalize<S>(map.a().adjoint() * x.basis());
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::degenerate_input) throw;
    throw Error(ErrorKind::degenerate_input, "degenerate projection: A^H X is rank deficient");
  }
}

template <FieldScalar S>
GrassmannPoint<S> reconstruct_point(const NestedMap<S>& map, const GrassmannPoint<S>& x) {
  if (x.ambient_dim() != map.ambient_dim() || x.dim() != map.subspace_dim())
    throw_shape("reconstruct_point: point is not on Gr(p, n) of the map");
  try {
    return orthonormalize<S>(map.a() * (map.a().adjoint() * x.basis()) + map.b());
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::degenerate_input) throw;
    throw Error(ErrorKind::degenerate_input, "degenerate reconstruction: A A^H X + B is rank deficient");
  }
}

template <FieldScalar S>
std::vector<GrassmannPoint<S>> project_all(const NestedMap<S>& map, std::span<const GrassmannPoint<S>> points) {
  std::vector<GrassmannPoint<S>> out;
  out.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    try {
      out.push_back(project_point(map, points[i]));
    } catch (const Error& e) {
      throw e.with_index(i);
    }
  }
  return out;
}

template <FieldScalar S>
std::vector<GrassmannPoint<S>> reconstruct_all(const NestedMap<S>& map,
                                               std::span<const GrassmannPoint<S>> points) {
  std::vector<GrassmannPoint<S>> out;
  out.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    try {
      out.push_back(reconstruct_point(map, points[i]));
    } catch (const Error& e) {
      throw e.with_index(i);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Unsupervised loss

template <FieldScalar S>
LossValue<S> loss_unsupervised(const ProductPoint<S>& params, std::span<const GrassmannPoint<S>> points,
                               Metric metric) {
  const Mat<S>& a = params.a;
  const Mat<S>& b = params.b;
  const Index n = a.rows();
  const Index m = a.cols();
  const Index p = b.cols();
  if (points.empty()) throw Error(ErrorKind::degenerate_input, "loss_unsupervised: empty dataset");
  if (b.rows() != n) throw_shape("loss_unsupervised: A and B~ row counts differ");
  check_dataset(points, n, p);

  const std::size_t count = points.size();
  std::vector<double> values(count);
  std::vector<Mat<S>> grad_m(count);
  std::vector<Mat<S>> grad_a(count);

  for (std::size_t i = 0; i < count; ++i) {
    const Mat<S>& x = points[i].basis();
    const Mat<S> d = x - b;
    const Mat<S> recon = b + a * (a.adjoint() * d);
    try {
      Mat<S> g;
      if (metric == Metric::projection) {
        // d_p^2 = ||(I - P) X||^2 with P the projector onto span(M);
        // gradient -2 (I - P) X X^H M (M^H M)^{-1}.
        auto [q, r] = thin_qr<S>(recon);
        const Mat<S> qx = q.adjoint() * x;
        const Mat<S> residual = x - q * qx;
        values[i] = residual.squaredNorm();
        const Mat<S> r_inv_h = r.adjoint().template triangularView<Eigen::Lower>().solve(Mat<S>::Identity(p, p));
        // X^H M (M^H M)^{-1} = (X^H Q) R^{-H}
        g = -2.0 * residual * (qx.adjoint() * r_inv_h);
      } else {
        values[i] = geodesic_sq_to_span<S>(x, recon);
        g = central_difference<S>([&](const Mat<S>& mm) { return geodesic_sq_to_span<S>(x, mm); }, recon);
      }
      grad_a[i] = g * (d.adjoint() * a) + d * (g.adjoint() * a);
      grad_m[i] = std::move(g);
    } catch (const Error& e) {
      throw e.with_index(i);
    }
  }

  const double inv_n = 1.0 / static_cast<double>(count);
  LossValue<S> out;
  out.value = pairwise_sum(values) * inv_n;
  const Mat<S> gm = tree_sum(grad_m, n, p) * inv_n;
  out.grad_b = gm - a * (a.adjoint() * gm);
  out.grad_a = tree_sum(grad_a, n, m) * inv_n;
  return out;
}

template <FieldScalar S>
double loss_unsupervised(const NestedMap<S>& map, std::span<const GrassmannPoint<S>> points, Metric metric) {
  return loss_unsupervised<S>(ProductPoint<S>{map.a(), map.b()}, points, metric).value;
}

// ---------------------------------------------------------------------------
// Affinity and supervised loss

AffinityMatrix build_affinity(std::span<const int> labels, const RealMat& distances, int k_within,
                              int k_between) {
  const auto n = static_cast<Index>(labels.size());
  if (distances.rows() != n || distances.cols() != n)
    throw_shape("build_affinity: distance matrix does not match the label count");
  if (k_within < 0 || k_between < 0) throw Error(ErrorKind::usage, "build_affinity: k must be nonnegative");
  if (((distances - distances.transpose()).cwiseAbs().maxCoeff()) > 1e-12 * (1.0 + distances.cwiseAbs().maxCoeff()))
    throw Error(ErrorKind::degenerate_input, "build_affinity: distance matrix is not symmetric");

  AffinityMatrix out{RealMat::Zero(n, n), {}};
  std::vector<Index> same;
  std::vector<Index> other;
  for (Index i = 0; i < n; ++i) {
    same.clear();
    other.clear();
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      (labels[i] == labels[j] ? same : other).push_back(j);
    }
    auto by_distance = [&](Index u, Index v) {
      return distances(i, u) < distances(i, v) || (distances(i, u) == distances(i, v) && u < v);
    };
    std::sort(same.begin(), same.end(), by_distance);
    std::sort(other.begin(), other.end(), by_distance);
    const auto kw = std::min<std::size_t>(static_cast<std::size_t>(k_within), same.size());
    const auto kb = std::min<std::size_t>(static_cast<std::size_t>(k_between), other.size());
    for (std::size_t t = 0; t < kw; ++t) out.values(i, same[t]) = out.values(same[t], i) = 1.0;
    for (std::size_t t = 0; t < kb; ++t) out.values(i, other[t]) = out.values(other[t], i) = -1.0;
  }
  if (k_within >= 1)
    for (Index i = 0; i < n; ++i)
      if ((out.values.row(i).array() > 0.0).count() == 0) out.rows_without_positive.push_back(static_cast<std::size_t>(i));
  return out;
}

template <FieldScalar S>
LossValue<S> loss_supervised(const Mat<S>& a, std::span<const GrassmannPoint<S>> points,
                             const AffinityMatrix& affinity, Metric metric) {
  const Index n = a.rows();
  const Index m = a.cols();
  const auto count = points.size();
  if (count == 0) throw Error(ErrorKind::degenerate_input, "loss_supervised: empty dataset");
  const Index p = points.front().dim();
  check_dataset(points, n, p);
  const auto big_n = static_cast<Index>(count);
  if (affinity.values.rows() != big_n || affinity.values.cols() != big_n)
    throw_shape("loss_supervised: affinity does not match the dataset size");

  std::vector<Mat<S>> y(count), q(count), r_inv_h(count);
  for (std::size_t i = 0; i < count; ++i) {
    y[i] = a.adjoint() * points[i].basis();
    try {
      auto [qi, ri] = thin_qr<S>(y[i]);
      q[i] = std::move(qi);
      r_inv_h[i] = ri.adjoint().template triangularView<Eigen::Lower>().solve(Mat<S>::Identity(p, p));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::degenerate_input) throw;
      throw Error(ErrorKind::degenerate_input, "degenerate projection: A^H X is rank deficient", i);
    }
  }

  const double scale = 1.0 / static_cast<double>(count * count);
  std::vector<double> rows(count, 0.0);
  std::vector<Mat<S>> grad_a(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto ii = static_cast<Index>(i);
    std::vector<double> terms;
    if (metric == Metric::projection) {
      // d_p^2(i, j) = p - ||Q_i^H Q_j||^2; dL/dY_i = -(4/N^2) (I - P_i) S_i Y_i W_i
      // with S_i = sum_j a_ij P_j and Y_i W_i = Q_i R_i^{-H}.
      Mat<S> sq = Mat<S>::Zero(m, p);
      for (std::size_t j = 0; j < count; ++j) {
        const double w = affinity.values(ii, static_cast<Index>(j));
        if (w == 0.0) continue;
        const Mat<S> overlap = q[j].adjoint() * q[i];
        terms.push_back(w * std::max(0.0, static_cast<double>(p) - overlap.squaredNorm()));
        sq += w * (q[j] * overlap);
      }
      const Mat<S> tangential = sq - q[i] * (q[i].adjoint() * sq);
      const Mat<S> gy = (-4.0 * scale) * tangential * r_inv_h[i];
      grad_a[i] = points[i].basis() * gy.adjoint();
    } else {
      std::vector<std::pair<std::size_t, double>> nbrs;
      for (std::size_t j = 0; j < count; ++j) {
        const double w = affinity.values(ii, static_cast<Index>(j));
        if (w == 0.0) continue;
        nbrs.emplace_back(j, w);
        terms.push_back(w * geodesic_sq_to_span<S>(q[j], y[i]));
      }
      auto row_loss = [&](const Mat<S>& yi) {
        std::vector<double> t;
        t.reserve(nbrs.size());
        for (auto [j, w] : nbrs) t.push_back(w * geodesic_sq_to_span<S>(q[j], yi));
        return pairwise_sum(t);
      };
      Mat<S> gy = Mat<S>::Zero(m, p);
      if (!nbrs.empty()) gy = (2.0 * scale) * central_difference<S>(row_loss, y[i]);
      grad_a[i] = points[i].basis() * gy.adjoint();
    }
    rows[i] = pairwise_sum(terms);
  }

  LossValue<S> out;
  out.value = pairwise_sum(rows) * scale;
  out.grad_a = tree_sum(grad_a, n, m);
  out.grad_b = Mat<S>(n, 0);
  return out;
}

// ---------------------------------------------------------------------------
// Variance

template <FieldScalar S>
double variance(std::span<const GrassmannPoint<S>> points, const KarcherOptions& opts) {
  if (points.size() < 2) throw Error(ErrorKind::degenerate_input, "variance needs at least two points");
  const GrassmannPoint<S> mean = frechet_mean(points, opts);
  return frechet_variance(points, mean);
}

template <FieldScalar S>
double explained_variance_ratio(const NestedMap<S>& map, std::span<const GrassmannPoint<S>> points,
                                const KarcherOptions& opts) {
  const double total = variance(points, opts);
  if (!(total > 0.0))
    throw Error(ErrorKind::undefined_ratio, "explained variance is undefined: the data have zero variance");
  const std::vector<GrassmannPoint<S>> projected = project_all(map, points);
  return variance<S>(projected, opts) / total;
}

// ---------------------------------------------------------------------------
// Fitting

namespace {

template <FieldScalar S>
Mat<S> data_svd_init(std::span<const GrassmannPoint<S>> points, Index m) {
  const Index n = points.front().ambient_dim();
  std::vector<Mat<S>> grams(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) grams[i] = points[i].projector();
  const Mat<S> scatter = tree_sum(grams, n, n);
  Eigen::SelfAdjointEigenSolver<Mat<S>> es(scatter);
  // Eigenvalues ascend; take the m largest in descending order.
  const Mat<S> leading = es.eigenvectors().rightCols(m).rowwise().reverse();
  return orthonormalize<S>(leading).basis();
}

template <FieldScalar S>
Mat<S> initial_a(std::span<const GrassmannPoint<S>> points, Index m, InitStrategy strategy, Rng& rng) {
  if (strategy == InitStrategy::data_svd) return data_svd_init(points, m);
  return sample_stiefel_uniform<S>(points.front().ambient_dim(), m, rng).basis();
}

struct Attempt {
  bool failed = false;
  std::string message;
};

template <FieldScalar S>
std::pair<MinimizeResult<S>, Attempt> run_restarts(const LossFunction<S>& loss,
                                                   std::span<const GrassmannPoint<S>> points, Index m,
                                                   Index b_cols, const FitConfig& config, Rng& rng) {
  const int restarts = std::max(1, config.restarts);
  std::optional<MinimizeResult<S>> best;
  Attempt best_attempt;
  for (int r = 0; r < restarts; ++r) {
    const InitStrategy strategy = r == 0 ? config.init : InitStrategy::random;
    ProductPoint<S> init{initial_a(points, m, strategy, rng), Mat<S>::Zero(points.front().ambient_dim(), b_cols)};
    MinimizeResult<S> result;
    Attempt attempt;
    try {
      result = minimize<S>(loss, std::move(init), config.optimizer);
    } catch (const ConvergenceErrorWith<MinimizeResult<S>>& e) {
      result = e.best();
      attempt = {true, e.what()};
    }
    if (!best || result.trace.back().loss < best->trace.back().loss) {
      best = std::move(result);
      best_attempt = attempt;
    }
  }
  return {std::move(*best), best_attempt};
}

template <FieldScalar S>
FitReport<S> make_report(NestedMap<S> map, const MinimizeResult<S>& result) {
  FitReport<S> report{std::move(map), result.loss_trace(), 0.0, result.iterations, result.converged,
                      result.trace.back().loss, result.grad_norm};
  return report;
}

template <FieldScalar S>
void check_fit_inputs(std::span<const GrassmannPoint<S>> points, Index m) {
  if (points.size() < 2) throw Error(ErrorKind::degenerate_input, "fitting needs at least two samples");
  const Index n = points.front().ambient_dim();
  const Index p = points.front().dim();
  check_dataset(points, n, p);
  if (!(p < m && m <= n))
    throw Error(ErrorKind::usage, "reduced dimension m=" + std::to_string(m) + " must satisfy p < m <= n (p=" +
                                      std::to_string(p) + ", n=" + std::to_string(n) + ")");
}

}  // namespace

template <FieldScalar S>
FitReport<S> fit_unsupervised(std::span<const GrassmannPoint<S>> points, Index m, const FitConfig& config,
                              Rng& rng) {
  check_fit_inputs(points, m);
  const Index p = points.front().dim();
  const LossFunction<S> loss = [&](const ProductPoint<S>& x) {
    return loss_unsupervised<S>(x, points, config.metric);
  };
  auto [result, attempt] = run_restarts<S>(loss, points, m, p, config, rng);
  NestedMap<S> map = NestedMap<S>::make(result.point.a, result.point.b);
  if (attempt.failed) throw ConvergenceErrorWith<NestedMap<S>>(attempt.message, std::move(map));
  FitReport<S> report = make_report(std::move(map), result);
  report.explained_variance_ratio = explained_variance_ratio(report.map, points, config.karcher);
  return report;
}

template <FieldScalar S>
FitReport<S> fit_supervised(std::span<const GrassmannPoint<S>> points, std::span<const int> labels, Index m,
                            const AffinityConfig& affinity_config, const FitConfig& config, Rng& rng) {
  check_fit_inputs(points, m);
  if (labels.size() != points.size())
    throw Error(ErrorKind::usage, "supervised fit needs one label per sample");
  if (std::set<int>(labels.begin(), labels.end()).size() < 2)
    throw Error(ErrorKind::supervision,
                "supervised fit needs at least two classes; use the unsupervised fit instead");
  const Index n = points.front().ambient_dim();
  const Index p = points.front().dim();

  const AffinityMatrix affinity = build_affinity(labels, distance_matrix(points, Metric::projection),
                                                 affinity_config.k_within, affinity_config.k_between);
  const LossFunction<S> loss = [&](const ProductPoint<S>& x) {
    return loss_supervised<S>(x.a, points, affinity, config.metric);
  };
  auto [result, attempt] = run_restarts<S>(loss, points, m, 0, config, rng);
  NestedMap<S> map = NestedMap<S>::make(result.point.a, Mat<S>::Zero(n, p));
  if (attempt.failed) throw ConvergenceErrorWith<NestedMap<S>>(attempt.message, std::move(map));
  FitReport<S> report = make_report(std::move(map), result);
  report.explained_variance_ratio = explained_variance_ratio(report.map, points, config.karcher);
  return report;
}

template <FieldScalar S>
std::vector<SequenceEntry> nested_sequence(std::span<const GrassmannPoint<S>> points, std::span<const Index> dims,
                                           const FitConfig& config, Rng& rng) {
  std::vector<SequenceEntry> out;
  if (dims.empty()) return out;
  if (points.empty()) throw Error(ErrorKind::degenerate_input, "nested_sequence: empty dataset");
  const Index n = points.front().ambient_dim();
  const Index p = points.front().dim();
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (!(p < dims[k] && dims[k] < n))
      throw Error(ErrorKind::usage, "nested_sequence: every m must satisfy p < m < n");
    if (k > 0 && dims[k] <= dims[k - 1])
      throw Error(ErrorKind::usage, "nested_sequence: dimensions must be strictly increasing");
  }
  for (Index m : dims) {
    SequenceEntry entry{m, std::nullopt, {}};
    try {
      entry.ratio = fit_unsupervised<S>(points, m, config, rng).explained_variance_ratio;
    } catch (const Error& e) {
      entry.error = e.what();
    }
    out.push_back(std::move(entry));
  }
  return out;
}

#define NGR_INSTANTIATE(S)                                                                                \
  template class NestedMap<S>;                                                                            \
  template GrassmannPoint<S> embed_point<S>(const NestedMap<S>&, const GrassmannPoint<S>&);               \
  template GrassmannPoint<S> project_point<S>(const NestedMap<S>&, const GrassmannPoint<S>&);             \
  template GrassmannPoint<S> reconstruct_point<S>(const NestedMap<S>&, const GrassmannPoint<S>&);         \
  template std::vector<GrassmannPoint<S>> project_all<S>(const NestedMap<S>&,                             \
                                                         std::span<const GrassmannPoint<S>>);             \
  template std::vector<GrassmannPoint<S>> reconstruct_all<S>(const NestedMap<S>&,                         \
                                                             std::span<const GrassmannPoint<S>>);         \
  template LossValue<S> loss_unsupervised<S>(const ProductPoint<S>&, std::span<const GrassmannPoint<S>>,  \
                                             Metric);                                                     \
  template double loss_unsupervised<S>(const NestedMap<S>&, std::span<const GrassmannPoint<S>>, Metric);  \
  template LossValue<S> loss_supervised<S>(const Mat<S>&, std::span<const GrassmannPoint<S>>,             \
                                           const AffinityMatrix&, Metric);                                \
  template double variance<S>(std::span<const GrassmannPoint<S>>, const KarcherOptions&);                 \
  template double explained_variance_ratio<S>(const NestedMap<S>&, std::span<const GrassmannPoint<S>>,    \
                                              const KarcherOptions&);                                     \
  template FitReport<S> fit_unsupervised<S>(std::span<const GrassmannPoint<S>>, Index, const FitConfig&,  \
                                            Rng&);                                                        \
  template FitReport<S> fit_supervised<S>(std::span<const GrassmannPoint<S>>, std::span<const int>,       \
                                          Index, const AffinityConfig&, const FitConfig&, Rng&);          \
  template std::vector<SequenceEntry> nested_sequence<S>(std::span<const GrassmannPoint<S>>,              \
                                                         std::span<const Index>, const FitConfig&, Rng&);

NGR_INSTANTIATE(double)
NGR_INSTANTIATE(Complex)

#undef NGR_INSTANTIATE

}  // namespace ngr
