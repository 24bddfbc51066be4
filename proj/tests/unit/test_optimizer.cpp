#include "test_support.hpp"

#include "ngr/optimizer.hpp"

namespace ngr {
namespace {

template <class S>
class OptimizerTest : public ::testing::Test {};
using Fields = ::testing::Types<double, Complex>;
TYPED_TEST_SUITE(OptimizerTest, Fields);

template <FieldScalar S>
ProductPoint<S> random_product_point(Index n, Index m, Index p, Rng& rng) {
  return {testing::random_point<S>(n, m, rng).basis(), gaussian_matrix<S>(n, p, rng)};
}

template <FieldScalar S>
ProductTangent<S> random_tangent(const ProductPoint<S>& x, Rng& rng) {
  return riemannian_gradient<S>(x, gaussian_matrix<S>(x.a.rows(), x.a.cols(), rng),
                                gaussian_matrix<S>(x.b.rows(), x.b.cols(), rng));
}

// --- gradient conversion -----------------------------------------------------

TYPED_TEST(OptimizerTest, GradientInsideSpanVanishes) {
  using S = TypeParam;
  Rng rng(1);
  const auto x = random_product_point<S>(6, 2, 1, rng);
  const Mat<S> g = x.a * gaussian_matrix<S>(2, 2, rng);
  const auto d = riemannian_gradient<S>(x, g, Mat<S>::Zero(6, 1));
  EXPECT_LT(d.da.norm(), 1e-12);
}

TYPED_TEST(OptimizerTest, HorizontalGradientUnchanged) {
  using S = TypeParam;
  Rng rng(2);
  const auto x = random_product_point<S>(6, 2, 1, rng);
  const auto h = random_tangent(x, rng);
  const auto d = riemannian_gradient<S>(x, h.da, h.db);
  EXPECT_LT((d.da - h.da).norm(), 1e-12);
  EXPECT_EQ(d.db, h.db);
}

TYPED_TEST(OptimizerTest, RandomGradientBecomesHorizontal) {
  using S = TypeParam;
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = random_product_point<S>(7, 3, 2, rng);
    const Mat<S> gb = gaussian_matrix<S>(7, 2, rng);
    const auto d = riemannian_gradient<S>(x, gaussian_matrix<S>(7, 3, rng), gb);
    EXPECT_LT((x.a.adjoint() * d.da).norm(), 1e-12);
    EXPECT_EQ(d.db, gb);
  }
}

TYPED_TEST(OptimizerTest, GradientShapeMismatchThrows) {
  using S = TypeParam;
  Rng rng(4);
  const auto x = random_product_point<S>(5, 2, 1, rng);
  EXPECT_THROW(riemannian_gradient<S>(x, Mat<S>::Zero(5, 3), Mat<S>::Zero(5, 1)), Error);
}

// --- retraction -----------------------------------------------------------------

TYPED_TEST(OptimizerTest, RetractZeroStepIsIdentity) {
  using S = TypeParam;
  Rng rng(5);
  const auto x = random_product_point<S>(6, 2, 1, rng);
  const auto y = retract(x, random_tangent(x, rng), 0.0);
  const auto gx = GrassmannPoint<S>::from_orthonormal(x.a);
  const auto gy = GrassmannPoint<S>::from_orthonormal(y.a);
  EXPECT_LT(geodesic_distance(gx, gy), 1e-12);
  EXPECT_EQ(y.b, x.b);
}

TYPED_TEST(OptimizerTest, RetractWithZeroDaTranslatesB) {
  using S = TypeParam;
  Rng rng(6);
  const auto x = random_product_point<S>(6, 2, 2, rng);
  ProductTangent<S> v{Mat<S>::Zero(6, 2), gaussian_matrix<S>(6, 2, rng)};
  const auto y = retract(x, v, 0.7);
  EXPECT_LT(geodesic_distance(GrassmannPoint<S>::from_orthonormal(x.a), GrassmannPoint<S>::from_orthonormal(y.a)),
            1e-12);
  EXPECT_LT((y.b - (x.b + 0.7 * v.db)).norm(), 1e-14);
}

TYPED_TEST(OptimizerTest, RetractionAgreesWithExpToSecondOrder) {
  using S = TypeParam;
  Rng rng(7);
  const auto x = random_product_point<S>(8, 3, 0, rng);
  auto v = random_tangent(x, rng);
  v.da /= v.da.norm();
  const auto gx = GrassmannPoint<S>::from_orthonormal(x.a);
  std::vector<double> ts{1e-1, 3e-2, 1e-2, 3e-3};
  std::vector<double> errs;
  for (double t : ts) {
    const auto r = GrassmannPoint<S>::from_orthonormal(retract(x, v, t).a);
    errs.push_back(geodesic_distance(r, exp_map(gx, Mat<S>(t * v.da))));
  }
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const double slope = std::log(errs[i] / errs[i + 1]) / std::log(ts[i] / ts[i + 1]);
    EXPECT_GE(slope, 1.9) << "t = " << ts[i];
  }
  for (std::size_t i = 0; i < ts.size(); ++i) EXPECT_LT(errs[i] / (ts[i] * ts[i]), 10.0);
}

TYPED_TEST(OptimizerTest, RetractionKeepsOrthonormality) {
  using S = TypeParam;
  Rng rng(8);
  const auto x = random_product_point<S>(6, 2, 1, rng);
  const auto y = retract(x, random_tangent(x, rng), 5.0);
  EXPECT_LT((y.a.adjoint() * y.a - Mat<S>::Identity(2, 2)).norm(), 1e-12);
}

// --- transport --------------------------------------------------------------------

TYPED_TEST(OptimizerTest, TransportToSamePointIsIdentity) {
  using S = TypeParam;
  Rng rng(9);
  const auto x = random_product_point<S>(6, 2, 1, rng);
  const auto v = random_tangent(x, rng);
  const auto w = transport(x, x, v);
  EXPECT_LT((w.da - v.da).norm(), 1e-12);
  EXPECT_EQ(w.db, v.db);
}

TYPED_TEST(OptimizerTest, TransportLandsInHorizontalSpace) {
  using S = TypeParam;
  Rng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_product_point<S>(6, 2, 1, rng);
    const auto y = random_product_point<S>(6, 2, 1, rng);
    const auto w = transport(x, y, random_tangent(x, rng));
    EXPECT_LT((y.a.adjoint() * w.da).norm(), 1e-12);
  }
}

TYPED_TEST(OptimizerTest, TransportOfZeroIsZero) {
  using S = TypeParam;
  Rng rng(11);
  const auto x = random_product_point<S>(6, 2, 1, rng);
  const auto y = random_product_point<S>(6, 2, 1, rng);
  const auto w = transport(x, y, ProductTangent<S>{Mat<S>::Zero(6, 2), Mat<S>::Zero(6, 1)});
  EXPECT_EQ(w.norm(), 0.0);
}

// --- minimize -----------------------------------------------------------------------

TYPED_TEST(OptimizerTest, ConvexQuadraticInB) {
  using S = TypeParam;
  Rng rng(12);
  const Mat<S> b0 = gaussian_matrix<S>(5, 2, rng);
  const LossFunction<S> loss = [&](const ProductPoint<S>& x) {
    return LossValue<S>{(x.b - b0).squaredNorm(), Mat<S>::Zero(x.a.rows(), x.a.cols()), Mat<S>(2.0 * (x.b - b0))};
  };
  auto init = random_product_point<S>(5, 3, 2, rng);
  init.b.setZero();
  const auto r = minimize(loss, init);
  EXPECT_TRUE(r.converged);
  EXPECT_LT(r.grad_norm, 1e-6);
  EXPECT_LE(r.iterations, 50);
  EXPECT_LT((r.point.b - b0).norm(), 1e-6);
}

template <FieldScalar S>
LossFunction<S> alignment_loss(const Vec<S>& u) {
  return [u](const ProductPoint<S>& x) {
    const Vec<S> c = x.a.adjoint() * u;
    return LossValue<S>{-c.squaredNorm(), Mat<S>(-2.0 * u * c.adjoint()), Mat<S>::Zero(x.b.rows(), x.b.cols())};
  };
}

TYPED_TEST(OptimizerTest, FindsTheMaximizingLine) {
  using S = TypeParam;
  Rng rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    Vec<S> u = gaussian_matrix<S>(6, 1, rng);
    u.normalize();
    const auto r = minimize(alignment_loss<S>(u), random_product_point<S>(6, 1, 0, rng));
    const auto found = GrassmannPoint<S>::from_orthonormal(r.point.a, Tolerances{.orthonormality = 1e-10});
    const auto target = GrassmannPoint<S>::from_orthonormal(Mat<S>(u));
    EXPECT_LT(geodesic_distance(found, target), 1e-4);
  }
}

TYPED_TEST(OptimizerTest, TraceIsMonotoneAndArmijoHolds) {
  using S = TypeParam;
  Rng rng(14);
  // A nonconvex Rayleigh-type objective: -tr(A^H M A) for Hermitian M.
  const Mat<S> g = gaussian_matrix<S>(7, 7, rng);
  const Mat<S> mtx = g + g.adjoint();
  const LossFunction<S> loss = [&](const ProductPoint<S>& x) {
    const Mat<S> ma = mtx * x.a;
    return LossValue<S>{-std::real((x.a.adjoint() * ma).trace()), Mat<S>(-2.0 * ma),
                        Mat<S>::Zero(x.b.rows(), x.b.cols())};
  };
  const OptimizerConfig cfg;
  const auto r = minimize(loss, random_product_point<S>(7, 2, 0, rng), cfg);
  EXPECT_TRUE(r.converged);
  ASSERT_GE(r.trace.size(), 2u);
  for (std::size_t k = 1; k < r.trace.size(); ++k) {
    const auto& prev = r.trace[k - 1];
    const auto& cur = r.trace[k];
    EXPECT_LE(cur.loss, prev.loss);
    // Armijo along the search direction d: f+ <= f + c t <g, d>, <g, d> < 0.
    EXPECT_LT(cur.slope, 0.0);
    EXPECT_LE(cur.loss, prev.loss + cfg.armijo_slope * cur.step * cur.slope + 1e-12 * std::abs(prev.loss));
  }
  EXPECT_LT((r.point.a.adjoint() * r.point.a - Mat<S>::Identity(2, 2)).norm(), 1e-8);
  // The optimum is minus the sum of the two largest eigenvalues.
  Eigen::SelfAdjointEigenSolver<Mat<S>> es(mtx);
  const double best = -(es.eigenvalues()(6) + es.eigenvalues()(5));
  EXPECT_NEAR(r.trace.back().loss, best, 1e-9 * std::abs(best));
}

TYPED_TEST(OptimizerTest, SteepestDescentRuleSatisfiesClassicArmijo) {
  using S = TypeParam;
  Rng rng(15);
  Vec<S> u = gaussian_matrix<S>(5, 1, rng);
  u.normalize();
  OptimizerConfig cfg;
  cfg.beta_rule = BetaRule::steepest_descent;
  const auto r = minimize(alignment_loss<S>(u), random_product_point<S>(5, 1, 0, rng), cfg);
  for (std::size_t k = 1; k < r.trace.size(); ++k) {
    const double g = r.trace[k - 1].grad_norm;
    EXPECT_LE(r.trace[k].loss, r.trace[k - 1].loss - cfg.armijo_slope * r.trace[k].step * g * g + 1e-15);
  }
}

TYPED_TEST(OptimizerTest, RunsAreDeterministic) {
  using S = TypeParam;
  Rng rng(16);
  Vec<S> u = gaussian_matrix<S>(6, 1, rng);
  u.normalize();
  const auto init = random_product_point<S>(6, 2, 0, rng);
  const auto a = minimize(alignment_loss<S>(u), init);
  const auto b = minimize(alignment_loss<S>(u), init);
  EXPECT_EQ(a.loss_trace(), b.loss_trace());
  EXPECT_EQ(a.point.a, b.point.a);
}

TYPED_TEST(OptimizerTest, MaxIterStopsWithoutConvergence) {
  using S = TypeParam;
  Rng rng(17);
  Vec<S> u = gaussian_matrix<S>(6, 1, rng);
  u.normalize();
  OptimizerConfig cfg;
  cfg.max_iter = 1;
  cfg.grad_tol = 1e-14;
  const auto r = minimize(alignment_loss<S>(u), random_product_point<S>(6, 1, 0, rng), cfg);
  EXPECT_FALSE(r.converged);
  EXPECT_LE(r.iterations, 1);
}

TYPED_TEST(OptimizerTest, BrokenGradientAbortsWithBestPoint) {
  using S = TypeParam;
  Rng rng(18);
  // The gradient points uphill, so no step can satisfy Armijo.
  const LossFunction<S> loss = [](const ProductPoint<S>& x) {
    return LossValue<S>{x.b.squaredNorm(), Mat<S>::Zero(x.a.rows(), x.a.cols()), Mat<S>(-2.0 * x.b)};
  };
  const auto init = random_product_point<S>(4, 1, 1, rng);
  try {
    minimize(loss, init);
    FAIL() << "expected a convergence error";
  } catch (const ConvergenceErrorWith<MinimizeResult<S>>& e) {
    EXPECT_EQ(e.kind(), ErrorKind::convergence);
    EXPECT_EQ(e.best().point.b, init.b);
  }
}

TEST(OptimizerConfigTest, Validation) {
  OptimizerConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.backtrack_factor = 1.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.grad_tol = 0.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.armijo_slope = -1.0;
  EXPECT_THROW(cfg.validate(), Error);
}

}  // namespace
}  // namespace ngr
