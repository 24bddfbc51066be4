#include "ngr/optimizer.hpp"

#include <algorithm>
#include <limits>

#include "ngr/manifold.hpp"

namespace ngr {

void OptimizerConfig::validate() const {
  if (max_iter < 0) throw Error(ErrorKind::usage, "max_iter must be nonnegative");
  if (!(grad_tol > 0.0)) throw Error(ErrorKind::usage, "grad_tol must be positive");
  if (!(initial_step > 0.0)) throw Error(ErrorKind::usage, "initial_step must be positive");
  if (!(armijo_slope > 0.0 && armijo_slope < 1.0))
    throw Error(ErrorKind::usage, "armijo_slope must lie in (0, 1)");
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0))
    throw Error(ErrorKind::usage, "backtrack_factor must lie in (0, 1)");
  if (max_backtracks < 1) throw Error(ErrorKind::usage, "max_backtracks must be positive");
  if (cg_restart_period && *cg_restart_period < 1)
    throw Error(ErrorKind::usage, "cg_restart_period must be positive");
}

template <FieldScalar S>
std::vector<double> MinimizeResult<S>::loss_trace() const {
  std::vector<double> out;
  out.reserve(trace.size());
  for (const auto& r : trace) out.push_back(r.loss);
  return out;
}

template <FieldScalar S>
ProductTangent<S> riemannian_gradient(const ProductPoint<S>& point, const Mat<S>& grad_a,
                                      const Mat<S>& grad_b) {
  if (grad_a.rows() != point.a.rows() || grad_a.cols() != point.a.cols() ||
      grad_b.rows() != point.b.rows() || grad_b.cols() != point.b.cols())
    throw_shape("riemannian_gradient: gradient shapes do not match the point");
  return {grad_a - point.a * (point.a.adjoint() * grad_a), grad_b};
}

template <FieldScalar S>
ProductPoint<S> retract(const ProductPoint<S>& point, const ProductTangent<S>& step, double t) {
  if (t == 0.0) return point;
  return {orthonormalize<S>(point.a + t * step.da).basis(), point.b + t * step.db};
}

template <FieldScalar S>
ProductTangent<S> transport(const ProductPoint<S>& from, const ProductPoint<S>& to,
                            const ProductTangent<S>& v) {
  if (from.a.rows() != to.a.rows() || from.a.cols() != to.a.cols() || v.da.rows() != to.a.rows() ||
      v.da.cols() != to.a.cols() || v.db.rows() != to.b.rows() || v.db.cols() != to.b.cols())
    throw_shape("transport: shape mismatch");
  return {v.da - to.a * (to.a.adjoint() * v.da), v.db};
}

namespace {

template <FieldScalar S>
ProductTangent<S> scaled(const ProductTangent<S>& v, double s) {
  return {s * v.da, s * v.db};
}

template <FieldScalar S>
std::optional<LossValue<S>> try_evaluate(const LossFunction<S>& loss, const ProductPoint<S>& x) {
  try {
    LossValue<S> v = loss(x);
    if (!std::isfinite(v.value)) return std::nullopt;
    return v;
  } catch (const Error& e) {
    // Trial points can leave the region where the loss is defined.
    if (e.kind() == ErrorKind::degenerate_input) return std::nullopt;
    throw;
  }
}

}  // namespace

template <FieldScalar S>
MinimizeResult<S> minimize(const LossFunction<S>& loss, ProductPoint<S> init, const OptimizerConfig& config) {
  config.validate();
  const Index n = init.a.rows();
  const Index m = init.a.cols();
  const Index p = init.b.cols();
  if (init.b.rows() != n && p > 0) throw_shape("minimize: A and B must have the same row count");
  if ((init.a.adjoint() * init.a - Mat<S>::Identity(m, m)).cwiseAbs().maxCoeff() > 1e-10)
    throw Error(ErrorKind::degenerate_input, "minimize: initial A does not have orthonormal columns");

  const int restart_period = config.cg_restart_period.value_or(
      std::max<int>(1, static_cast<int>(real_dof<S> * (m * (n - m) + n * p))));

  MinimizeResult<S> result;
  result.point = std::move(init);
  LossValue<S> current = loss(result.point);
  if (!std::isfinite(current.value))
    throw Error(ErrorKind::degenerate_input, "minimize: loss is not finite at the initial point");
  ProductTangent<S> grad = riemannian_gradient(result.point, current.grad_a, current.grad_b);
  double grad_norm = grad.norm();
  result.trace.push_back({current.value, grad_norm, 0.0, 0.0, 0, true});

  ProductTangent<S> dir = scaled(grad, -1.0);
  bool steepest = true;
  int since_restart = 0;
  std::optional<double> previous_loss;

  while (result.iterations < config.max_iter) {
    if (grad_norm <= config.grad_tol) break;

    double slope = inner(grad, dir);
    if (!(slope < 0.0)) {
      dir = scaled(grad, -1.0);
      slope = -grad_norm * grad_norm;
      steepest = true;
    }

    const double dir_norm = dir.norm();
    double t = config.initial_step / dir_norm;
    if (previous_loss) {
      // Quadratic-interpolation guess from the last decrease, doubled.
      const double guess = 4.0 * (current.value - *previous_loss) / slope;
      if (std::isfinite(guess) && guess > 0.0) t = guess;
    }

    std::optional<LossValue<S>> accepted;
    ProductPoint<S> candidate;
    int backtracks = 0;
    for (; backtracks <= config.max_backtracks; ++backtracks, t *= config.backtrack_factor) {
      try {
        candidate = retract(result.point, dir, t);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::degenerate_input) throw;
        continue;
      }
      auto trial = try_evaluate(loss, candidate);
      if (trial && trial->value <= current.value + config.armijo_slope * t * slope) {
        accepted = std::move(trial);
        break;
      }
    }

    if (!accepted) {
      if (!steepest) {
        dir = scaled(grad, -1.0);
        steepest = true;
        since_restart = 0;
        continue;
      }
      result.grad_norm = grad_norm;
      throw ConvergenceErrorWith<MinimizeResult<S>>(
          "line search failed after " + std::to_string(config.max_backtracks) +
              " backtracks along the steepest-descent direction",
          result);
    }

    ProductTangent<S> new_grad = riemannian_gradient(candidate, accepted->grad_a, accepted->grad_b);
    const double new_grad_norm = new_grad.norm();

    double beta = 0.0;
    switch (config.beta_rule) {
      case BetaRule::polak_ribiere_plus: {
        const ProductTangent<S> old_grad = transport(result.point, candidate, grad);
        const double num = inner(new_grad, new_grad) - inner(new_grad, old_grad);
        beta = std::max(0.0, num / (grad_norm * grad_norm));
        break;
      }
      case BetaRule::fletcher_reeves:
        beta = (new_grad_norm * new_grad_norm) / (grad_norm * grad_norm);
        break;
      case BetaRule::steepest_descent:
        beta = 0.0;
        break;
    }
    ++since_restart;
    if (since_restart >= restart_period) {
      beta = 0.0;
      since_restart = 0;
    }

    const ProductTangent<S> carried = transport(result.point, candidate, dir);
    dir = {-new_grad.da + beta * carried.da, -new_grad.db + beta * carried.db};
    const bool was_steepest = steepest;
    steepest = (beta == 0.0);

    previous_loss = current.value;
    current = std::move(*accepted);
    result.point = std::move(candidate);
    grad = std::move(new_grad);
    grad_norm = new_grad_norm;
    ++result.iterations;
    result.trace.push_back({current.value, grad_norm, t, slope, backtracks, was_steepest});
  }

  result.grad_norm = grad_norm;
  result.converged = grad_norm <= config.grad_tol;
  return result;
}

#define NGR_INSTANTIATE(S)                                                                           \
  template struct MinimizeResult<S>;                                                                 \
  template ProductTangent<S> riemannian_gradient<S>(const ProductPoint<S>&, const Mat<S>&,           \
                                                    const Mat<S>&);                                  \
  template ProductPoint<S> retract<S>(const ProductPoint<S>&, const ProductTangent<S>&, double);     \
  template ProductTangent<S> transport<S>(const ProductPoint<S>&, const ProductPoint<S>&,            \
                                          const ProductTangent<S>&);                                 \
  template MinimizeResult<S> minimize<S>(const LossFunction<S>&, ProductPoint<S>, const OptimizerConfig&);

NGR_INSTANTIATE(double)
NGR_INSTANTIATE(Complex)

#undef NGR_INSTANTIATE

}  // namespace ngr
