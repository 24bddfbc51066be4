#pragma once

// Nested Grassmann model: embedding of Gr(p, m) into Gr(p, n) by
// X -> span(A X + B) and its projection X -> span(A^H X), plus the
// unsupervised and supervised losses used to fit (A, B).

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ngr/manifold.hpp"
#include "ngr/optimizer.hpp"

namespace ngr {

/// The pair (A, B) with A^H A = I_m and A^H B = 0.
template <FieldScalar S>
class NestedMap {
 public:
  /// Validates A and stores B = (I - A A^H) b_tilde (b_tilde itself when A^H b_tilde is
  /// already zero to rounding).
  static NestedMap make(Mat<S> a, const Mat<S>& b_tilde, const Tolerances& tol = {});
  /// A = [I_m; 0], B = 0.
  static NestedMap natural(Index n, Index m, Index p);

  const Mat<S>& a() const noexcept { return a_; }
  const Mat<S>& b() const noexcept { return b_; }
  Index ambient_dim() const noexcept { return a_.rows(); }
  Index reduced_dim() const noexcept { return a_.cols(); }
  Index subspace_dim() const noexcept { return b_.cols(); }

 private:
  NestedMap(Mat<S> a, Mat<S> b) : a_(std::move(a)), b_(std::move(b)) {}

  Mat<S> a_;
  Mat<S> b_;
};

template <FieldScalar S>
GrassmannPoint<S> embed_point(const NestedMap<S>& map, const GrassmannPoint<S>& x);

template <FieldScalar S>
GrassmannPoint<S> project_point(const NestedMap<S>& map, const GrassmannPoint<S>& x);

/// span(A A^H X + B).
template <FieldScalar S>
GrassmannPoint<S> reconstruct_point(const NestedMap<S>& map, const GrassmannPoint<S>& x);

/// Batch projection; a degenerate sample is reported by its index.
template <FieldScalar S>
std::vector<GrassmannPoint<S>> project_all(const NestedMap<S>& map, std::span<const GrassmannPoint<S>> points);

template <FieldScalar S>
std::vector<GrassmannPoint<S>> reconstruct_all(const NestedMap<S>& map,
                                               std::span<const GrassmannPoint<S>> points);

/// L_u(A, B~) = (1/N) sum_i d^2(X_i, span(A A^H X_i + (I - A A^H) B~)).
///
/// Projection metric: closed-form gradient. Geodesic metric: the gradient of
/// each d_g^2 term with respect to its reconstruction matrix is taken by
/// central differences, then chained analytically into (A, B~).
template <FieldScalar S>
LossValue<S> loss_unsupervised(const ProductPoint<S>& params, std::span<const GrassmannPoint<S>> points,
                               Metric metric);

template <FieldScalar S>
double loss_unsupervised(const NestedMap<S>& map, std::span<const GrassmannPoint<S>> points, Metric metric);

/// Symmetric {-1, 0, +1} affinity from k-nearest within/between-class
/// neighbours.
struct AffinityMatrix {
  RealMat values;
  /// Rows with no +1 entry although k_within >= 1 (singleton classes).
  std::vector<std::size_t> rows_without_positive;
};

AffinityMatrix build_affinity(std::span<const int> labels, const RealMat& distances, int k_within,
                              int k_between);

/// L_s(A) = (1/N^2) sum_{i,j} a_ij d^2(span(A^H X_i), span(A^H X_j)).
/// grad_b of the result is empty.
template <FieldScalar S>
LossValue<S> loss_supervised(const Mat<S>& a, std::span<const GrassmannPoint<S>> points,
                             const AffinityMatrix& affinity, Metric metric);

enum class InitStrategy { data_svd, random };

struct FitConfig {
  Metric metric = Metric::projection;
  OptimizerConfig optimizer;
  int restarts = 1;
  InitStrategy init = InitStrategy::data_svd;
  KarcherOptions karcher;
};

struct AffinityConfig {
  int k_within = 5;
  int k_between = 5;
};

template <FieldScalar S>
struct FitReport {
  NestedMap<S> map;
  std::vector<double> loss_trace;
  double explained_variance_ratio = 0.0;
  int iterations = 0;
  bool converged = false;
  double final_loss = 0.0;
  double grad_norm = 0.0;
};

/// Minimizes L_u over Gr(m, n) x F^{n x p}; p < m <= n.
template <FieldScalar S>
FitReport<S> fit_unsupervised(std::span<const GrassmannPoint<S>> points, Index m, const FitConfig& config,
                              Rng& rng);

/// Minimizes L_s over Gr(m, n) with B = 0. Needs at least two classes.
template <FieldScalar S>
FitReport<S> fit_supervised(std::span<const GrassmannPoint<S>> points, std::span<const int> labels, Index m,
                            const AffinityConfig& affinity, const FitConfig& config, Rng& rng);

/// Frechet variance (1/N) sum d_g^2(X_i, mean).
template <FieldScalar S>
double variance(std::span<const GrassmannPoint<S>> points, const KarcherOptions& opts = {});

/// variance({span(A^H X_j)}) / variance({X_j}).
template <FieldScalar S>
double explained_variance_ratio(const NestedMap<S>& map, std::span<const GrassmannPoint<S>> points,
                                const KarcherOptions& opts = {});

struct SequenceEntry {
  Index m = 0;
  std::optional<double> ratio;
  std::string error;  // empty on success
};

/// One independent fit per candidate dimension.
template <FieldScalar S>
std::vector<SequenceEntry> nested_sequence(std::span<const GrassmannPoint<S>> points, std::span<const Index> dims,
                                           const FitConfig& config, Rng& rng);

}  // namespace ngr
