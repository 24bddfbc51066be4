#pragma once

// Comparison methods: principal geodesic analysis by tangent PCA at the
// Frechet mean, its supervised variant, and leave-one-out geodesic kNN.

#include <span>
#include <vector>

#include "ngr/manifold.hpp"

namespace ngr {

template <FieldScalar S>
struct PgaModel {
  GrassmannPoint<S> mean;
  /// Orthonormal horizontal directions at `mean` (trace inner product).
  std::vector<Mat<S>> components;
  /// Training-set tangent variance along each component; nonincreasing.
  /// sPGA chooses its subspace by `scores`, then orders it by variance.
  std::vector<double> component_variances;
  /// Eigenvalues of the eigenproblem that produced the components.
  std::vector<double> scores;
  /// (1/N) sum ||Log_mean(X_i)||^2 over the training set.
  double total_variance = 0.0;
};

/// Real dimension of the tangent space of Gr(p, n) over S.
template <FieldScalar S>
Index tangent_dimension(Index n, Index p) {
  return real_dof<S> * p * (n - p);
}

template <FieldScalar S>
PgaModel<S> pga_fit(std::span<const GrassmannPoint<S>> points, Index num_components,
                    const KarcherOptions& karcher = {});

/// Fraction of the tangent variance of `points` (log-mapped at the model
/// mean) captured by the first k components.
template <FieldScalar S>
double pga_explained_variance(const PgaModel<S>& model, std::span<const GrassmannPoint<S>> points, Index k);

/// Supervised PCA in the tangent space: leading eigenvectors of
/// T H K H T^T with H the centering operator and K_ij = [y_i == y_j].
template <FieldScalar S>
PgaModel<S> spga_fit(std::span<const GrassmannPoint<S>> points, std::span<const int> labels,
                     Index num_components, const KarcherOptions& karcher = {});

/// Exp_mean of each log-mapped point projected onto the first k components.
template <FieldScalar S>
std::vector<GrassmannPoint<S>> pga_reduce(const PgaModel<S>& model, std::span<const GrassmannPoint<S>> points,
                                          Index k);

struct KnnResult {
  double accuracy = 0.0;
  std::vector<int> predictions;
};

/// Leave-one-out kNN on a precomputed distance matrix. Majority vote among
/// the k nearest others; ties go to the tied class with the nearest member.
KnnResult knn_loo(const RealMat& distances, std::span<const int> labels, int k);

template <FieldScalar S>
KnnResult gknn_loo(std::span<const GrassmannPoint<S>> points, std::span<const int> labels, int k,
                   Metric metric = Metric::geodesic);

}  // namespace ngr
