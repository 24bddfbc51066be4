#include "ngr/baselines.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace ngr {

namespace {

// Coordinates of a horizontal tangent matrix in the orthonormal basis
// {complement * E_rc (and i * complement * E_rc for the complex field)}.
template <FieldScalar S>
RealVec flatten(const Mat<S>& coords) {
  RealVec v(real_dof<S> * coords.size());
  Index k = 0;
  for (Index c = 0; c < coords.cols(); ++c)
    for (Index r = 0; r < coords.rows(); ++r) {
      if constexpr (std::same_as<S, Complex>) {
        v(k++) = coords(r, c).real();
        v(k++) = coords(r, c).imag();
      } else {
        v(k++) = coords(r, c);
      }
    }
  return v;
}

template <FieldScalar S>
Mat<S> unflatten(const RealVec& v, Index rows, Index cols) {
  Mat<S> coords(rows, cols);
  Index k = 0;
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) {
      if constexpr (std::same_as<S, Complex>) {
        coords(r, c) = Complex(v(k), v(k + 1));
        k += 2;
      } else {
        coords(r, c) = v(k++);
      }
    }
  return coords;
}

template <FieldScalar S>
struct TangentData {
  GrassmannPoint<S> mean;
  Mat<S> complement;  // n x (n - p)
  RealMat coords;     // d x N
};

template <FieldScalar S>
TangentData<S> tangent_data(std::span<const GrassmannPoint<S>> points, const KarcherOptions& karcher) {
  if (points.size() < 2) throw Error(ErrorKind::degenerate_input, "PGA needs at least two samples");
  GrassmannPoint<S> mean = frechet_mean(points, karcher);
  Mat<S> complement = orthogonal_complement(mean);
  const Index n = mean.ambient_dim();
  const Index p = mean.dim();
  RealMat coords(tangent_dimension<S>(n, p), static_cast<Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    try {
      const Mat<S> h = log_map(mean, points[i]).mat();
      coords.col(static_cast<Index>(i)) = flatten<S>(Mat<S>(complement.adjoint() * h));
    } catch (const Error& e) {
      throw e.with_index(i);
    }
  }
  return {std::move(mean), std::move(complement), std::move(coords)};
}

// Eigenpairs of a symmetric matrix, eigenvalues descending.
std::pair<RealVec, RealMat> descending_eigen(const RealMat& sym) {
  Eigen::SelfAdjointEigenSolver<RealMat> es(sym);
  return {es.eigenvalues().reverse(), es.eigenvectors().rowwise().reverse()};
}

template <FieldScalar S>
PgaModel<S> assemble(TangentData<S>&& data, const RealVec& evals, const RealMat& evecs, Index num_components) {
  const Index n = data.mean.ambient_dim();
  const Index p = data.mean.dim();
  const double inv_n = 1.0 / static_cast<double>(data.coords.cols());
  PgaModel<S> model{data.mean, {}, {}, {}, data.coords.squaredNorm() * inv_n};
  for (Index c = 0; c < num_components; ++c) {
    const RealVec u = evecs.col(c);
    model.components.push_back(data.complement * unflatten<S>(u, n - p, p));
    model.component_variances.push_back((data.coords.transpose() * u).squaredNorm() * inv_n);
    model.scores.push_back(evals(c));
  }
  return model;
}

template <FieldScalar S>
void check_component_count(Index num_components, Index n, Index p) {
  if (num_components < 0 || num_components > tangent_dimension<S>(n, p))
    throw Error(ErrorKind::usage, "number of components must lie in [0, " +
                                      std::to_string(tangent_dimension<S>(n, p)) + "]");
}

}  // namespace

template <FieldScalar S>
PgaModel<S> pga_fit(std::span<const GrassmannPoint<S>> points, Index num_components, const KarcherOptions& karcher) {
  if (points.empty()) throw Error(ErrorKind::degenerate_input, "PGA needs at least two samples");
  check_component_count<S>(num_components, points.front().ambient_dim(), points.front().dim());
  TangentData<S> data = tangent_data(points, karcher);
  if (!(data.coords.squaredNorm() > 0.0))
    throw Error(ErrorKind::degenerate_input, "PGA is undefined for data with zero variance");
  const double inv_n = 1.0 / static_cast<double>(data.coords.cols());
  const RealMat cov = data.coords * data.coords.transpose() * inv_n;
  auto [evals, evecs] = descending_eigen(cov);
  return assemble(std::move(data), evals, evecs, num_components);
}

template <FieldScalar S>
PgaModel<S> spga_fit(std::span<const GrassmannPoint<S>> points, std::span<const int> labels, Index num_components,
                     const KarcherOptions& karcher) {
  if (points.empty()) throw Error(ErrorKind::degenerate_input, "sPGA needs at least two samples");
  if (labels.size() != points.size()) throw Error(ErrorKind::usage, "sPGA needs one label per sample");
  check_component_count<S>(num_components, points.front().ambient_dim(), points.front().dim());
  if (std::set<int>(labels.begin(), labels.end()).size() < 2)
    throw Error(ErrorKind::supervision, "sPGA needs at least two classes (H K H vanishes)");
  TangentData<S> data = tangent_data(points, karcher);
  if (!(data.coords.squaredNorm() > 0.0))
    throw Error(ErrorKind::degenerate_input, "sPGA is undefined for data with zero variance");

  const Index count = data.coords.cols();
  RealMat kernel(count, count);
  for (Index i = 0; i < count; ++i)
    for (Index j = 0; j < count; ++j) kernel(i, j) = labels[i] == labels[j] ? 1.0 : 0.0;
  const RealMat centering = RealMat::Identity(count, count) - RealMat::Constant(count, count, 1.0 / count);
  const RealMat target = data.coords * (centering * kernel * centering) * data.coords.transpose();
  auto [evals, evecs] = descending_eigen(target);
  PgaModel<S> model = assemble(std::move(data), evals, evecs, num_components);
  // The supervised eigenproblem picks the subspace; inside it, order by
  // captured variance like plain PGA.
  std::vector<std::size_t> order(model.components.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return model.component_variances[i] > model.component_variances[j];
  });
  PgaModel<S> sorted{model.mean, {}, {}, {}, model.total_variance};
  for (std::size_t i : order) {
    sorted.components.push_back(model.components[i]);
    sorted.component_variances.push_back(model.component_variances[i]);
    sorted.scores.push_back(model.scores[i]);
  }
  return sorted;
}

template <FieldScalar S>
double pga_explained_variance(const PgaModel<S>& model, std::span<const GrassmannPoint<S>> points, Index k) {
  if (k < 0 || k > static_cast<Index>(model.components.size()))
    throw Error(ErrorKind::usage, "k exceeds the number of fitted components");
  std::vector<double> total(points.size()), captured(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    Mat<S> h;
    try {
      h = log_map(model.mean, points[i]).mat();
    } catch (const Error& e) {
      throw e.with_index(i);
    }
    total[i] = h.squaredNorm();
    double c = 0.0;
    for (Index j = 0; j < k; ++j) {
      const double coeff = real_inner<S>(model.components[j], h);
      c += coeff * coeff;
    }
    captured[i] = c;
  }
  const double denom = pairwise_sum(total);
  if (!(denom > 0.0)) throw Error(ErrorKind::undefined_ratio, "explained variance is undefined: zero tangent variance");
  return pairwise_sum(captured) / denom;
}

template <FieldScalar S>
std::vector<GrassmannPoint<S>> pga_reduce(const PgaModel<S>& model, std::span<const GrassmannPoint<S>> points,
                                          Index k) {
  if (k < 0 || k > static_cast<Index>(model.components.size()))
    throw Error(ErrorKind::usage, "k exceeds the number of fitted components");
  std::vector<GrassmannPoint<S>> out;
  out.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    try {
      const Mat<S> h = log_map(model.mean, points[i]).mat();
      Mat<S> reduced = Mat<S>::Zero(h.rows(), h.cols());
      for (Index j = 0; j < k; ++j) reduced += real_inner<S>(model.components[j], h) * model.components[j];
      out.push_back(exp_map(model.mean, reduced));
    } catch (const Error& e) {
      throw e.with_index(i);
    }
  }
  return out;
}

KnnResult knn_loo(const RealMat& distances, std::span<const int> labels, int k) {
  const auto n = static_cast<Index>(labels.size());
  if (distances.rows() != n || distances.cols() != n) throw_shape("knn_loo: distance matrix does not match labels");
  if (n < 2) throw Error(ErrorKind::degenerate_input, "knn_loo needs at least two samples");
  if (k < 1 || k > n - 1) throw Error(ErrorKind::usage, "knn_loo: k must lie in [1, N-1]");

  KnnResult out;
  out.predictions.resize(static_cast<std::size_t>(n));
  std::vector<Index> order;
  Index correct = 0;
  for (Index i = 0; i < n; ++i) {
    order.clear();
    for (Index j = 0; j < n; ++j)
      if (j != i) order.push_back(j);
    std::stable_sort(order.begin(), order.end(), [&](Index u, Index v) { return distances(i, u) < distances(i, v); });
    std::map<int, int> votes;
    for (int t = 0; t < k; ++t) ++votes[labels[order[t]]];
    int best_votes = 0;
    for (const auto& [label, count] : votes) best_votes = std::max(best_votes, count);
    int prediction = labels[order[0]];
    for (int t = 0; t < k; ++t) {
      const int label = labels[order[t]];
      if (votes[label] == best_votes) {
        prediction = label;
        break;
      }
    }
    out.predictions[static_cast<std::size_t>(i)] = prediction;
    if (prediction == labels[i]) ++correct;
  }
  out.accuracy = static_cast<double>(correct) / static_cast<double>(n);
  return out;
}

template <FieldScalar S>
KnnResult gknn_loo(std::span<const GrassmannPoint<S>> points, std::span<const int> labels, int k, Metric metric) {
  if (labels.size() != points.size()) throw Error(ErrorKind::usage, "gknn_loo needs one label per sample");
  return knn_loo(distance_matrix(points, metric), labels, k);
}

#define NGR_INSTANTIATE(S)                                                                                 \
  template PgaModel<S> pga_fit<S>(std::span<const GrassmannPoint<S>>, Index, const KarcherOptions&);       \
  template double pga_explained_variance<S>(const PgaModel<S>&, std::span<const GrassmannPoint<S>>, Index); \
  template PgaModel<S> spga_fit<S>(std::span<const GrassmannPoint<S>>, std::span<const int>, Index,        \
                                   const KarcherOptions&);                                                 \
  template std::vector<GrassmannPoint<S>> pga_reduce<S>(const PgaModel<S>&,                                \
                                                        std::span<const GrassmannPoint<S>>, Index);        \
  template KnnResult gknn_loo<S>(std::span<const GrassmannPoint<S>>, std::span<const int>, int, Metric);

NGR_INSTANTIATE(double)
NGR_INSTANTIATE(Complex)

#undef NGR_INSTANTIATE

}  // namespace ngr
