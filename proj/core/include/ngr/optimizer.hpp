#pragma once

// Riemannian conjugate gradient on Gr(m, n) x F^{n x p}.
//
// The Grassmann factor is carried by an orthonormal representative A; its
// tangent directions are horizontal (A^H dA = 0), which makes the search
// invariant to A -> A O. The Euclidean factor B is unconstrained.

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "ngr/common.hpp"

namespace ngr {

template <FieldScalar S>
struct ProductPoint {
  Mat<S> a;  // n x m, orthonormal columns
  Mat<S> b;  // n x p, may have zero columns
};

template <FieldScalar S>
struct ProductTangent {
  Mat<S> da;
  Mat<S> db;

  double norm() const { return std::sqrt(da.squaredNorm() + db.squaredNorm()); }
};

/// Re tr(u.da^H v.da) + Re tr(u.db^H v.db).
template <FieldScalar S>
double inner(const ProductTangent<S>& u, const ProductTangent<S>& v) {
  return real_inner<S>(u.da, v.da) + real_inner<S>(u.db, v.db);
}

enum class BetaRule { polak_ribiere_plus, fletcher_reeves, steepest_descent };

struct OptimizerConfig {
  int max_iter = 300;
  double grad_tol = 1e-6;
  double initial_step = 1.0;
  double armijo_slope = 1e-4;
  double backtrack_factor = 0.5;
  int max_backtracks = 30;
  /// Defaults to the real dimension of the search space.
  std::optional<int> cg_restart_period;
  BetaRule beta_rule = BetaRule::polak_ribiere_plus;

  void validate() const;
};

/// Loss value with its Euclidean gradients; the gradient convention is
/// df = Re tr(grad_a^H dA) + Re tr(grad_b^H dB).
template <FieldScalar S>
struct LossValue {
  double value = 0.0;
  Mat<S> grad_a;
  Mat<S> grad_b;
};

template <FieldScalar S>
using LossFunction = std::function<LossValue<S>(const ProductPoint<S>&)>;

struct IterationRecord {
  double loss = 0.0;       // loss at the accepted iterate
  double grad_norm = 0.0;  // Riemannian gradient norm at the accepted iterate
  double step = 0.0;       // accepted step length t
  double slope = 0.0;      // directional derivative <grad, d> before the step
  int backtracks = 0;
  bool restarted = false;  // direction was reset to steepest descent
};

template <FieldScalar S>
struct MinimizeResult {
  ProductPoint<S> point;
  std::vector<IterationRecord> trace;  // trace[0] describes the initial point
  int iterations = 0;
  bool converged = false;
  double grad_norm = 0.0;

  std::vector<double> loss_trace() const;
};

/// dA = (I - A A^H) G_A, dB = G_B.
template <FieldScalar S>
ProductTangent<S> riemannian_gradient(const ProductPoint<S>& point, const Mat<S>& grad_a,
                                      const Mat<S>& grad_b);

/// QR retraction on A, additive step on B.
template <FieldScalar S>
ProductPoint<S> retract(const ProductPoint<S>& point, const ProductTangent<S>& step, double t);

/// Projection transport: re-horizontalize dA at the destination.
template <FieldScalar S>
ProductTangent<S> transport(const ProductPoint<S>& from, const ProductPoint<S>& to,
                            const ProductTangent<S>& v);

/// Conjugate-gradient minimization with Armijo backtracking. Returns the
/// best iterate; the accepted-loss trace is nonincreasing. When the line
/// search fails along a steepest-descent direction the run aborts with
/// ConvergenceErrorWith<MinimizeResult<S>> carrying the best point.
template <FieldScalar S>
MinimizeResult<S> minimize(const LossFunction<S>& loss, ProductPoint<S> init,
                           const OptimizerConfig& config = {});

}  // namespace ngr
