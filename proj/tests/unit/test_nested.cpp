#include "test_support.hpp"

#include "ngr/datagen.hpp"
#include "ngr/nested.hpp"

namespace ngr {
namespace {

template <class S>
class NestedTest : public ::testing::Test {};
using Fields = ::testing::Types<double, Complex>;
TYPED_TEST_SUITE(NestedTest, Fields);

template <FieldScalar S>
NestedMap<S> random_map(Index n, Index m, Index p, double b_scale, Rng& rng) {
  return NestedMap<S>::make(testing::random_point<S>(n, m, rng).basis(), Mat<S>(b_scale * gaussian_matrix<S>(n, p, rng)));
}

template <FieldScalar S>
std::vector<GrassmannPoint<S>> random_points(std::size_t count, Index n, Index p, Rng& rng) {
  std::vector<GrassmannPoint<S>> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(testing::random_point<S>(n, p, rng));
  return out;
}

template <FieldScalar S>
double angle_between(const GrassmannPoint<S>& x, const GrassmannPoint<S>& y) {
  return principal_angles(x, y).max();
}

// Relative error of the analytic directional derivative against a central
// difference with h = 1e-6.
template <class F>
double directional_error(const F& f, double analytic, double h = 1e-6) {
  const double fd = (f(h) - f(-h)) / (2 * h);
  return std::abs(fd - analytic) / std::max({std::abs(fd), std::abs(analytic), 1e-8});
}

// --- maps ---------------------------------------------------------------------

TYPED_TEST(NestedTest, MakeStoresProjectedB) {
  using S = TypeParam;
  Rng rng(1);
  const auto map = random_map<S>(7, 3, 2, 1.0, rng);
  EXPECT_LT((map.a().adjoint() * map.a() - Mat<S>::Identity(3, 3)).norm(), 1e-10);
  EXPECT_LT((map.a().adjoint() * map.b()).norm(), 1e-8);
}

TYPED_TEST(NestedTest, MakeRejectsBadA) {
  using S = TypeParam;
  Mat<S> a = Mat<S>::Identity(5, 2);
  a(0, 0) = S(2);
  EXPECT_THROW(NestedMap<S>::make(a, Mat<S>::Zero(5, 1)), Error);
}

TYPED_TEST(NestedTest, NaturalEmbeddingZeroPads) {
  using S = TypeParam;
  Rng rng(2);
  const auto map = NestedMap<S>::natural(6, 3, 2);
  const auto z = testing::random_point<S>(3, 2, rng);
  const auto x = embed_point(map, z);
  Mat<S> padded = Mat<S>::Zero(6, 2);
  padded.topRows(3) = z.basis();
  EXPECT_LT(geodesic_distance(x, GrassmannPoint<S>::from_orthonormal(padded)), 1e-12);
}

TYPED_TEST(NestedTest, EmbeddingWithoutOffsetIsAnIsometry) {
  using S = TypeParam;
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto map = random_map<S>(8, 4, 2, 0.0, rng);
    const auto z1 = testing::random_point<S>(4, 2, rng);
    const auto z2 = testing::random_point<S>(4, 2, rng);
    const auto x1 = embed_point(map, z1);
    const auto x2 = embed_point(map, z2);
    EXPECT_NEAR(geodesic_distance(x1, x2), geodesic_distance(z1, z2), 1e-9);
    EXPECT_NEAR(projection_distance(x1, x2), projection_distance(z1, z2), 1e-9);
  }
}

TYPED_TEST(NestedTest, ProjectAfterEmbedIsIdentity) {
  using S = TypeParam;
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const auto map = random_map<S>(8, 4, 2, 1.0, rng);
    const auto z = testing::random_point<S>(4, 2, rng);
    EXPECT_LT(angle_between(project_point(map, embed_point(map, z)), z), 1e-9);
  }
}

TYPED_TEST(NestedTest, ProjectionWithNaturalMapTruncates) {
  using S = TypeParam;
  Rng rng(5);
  const auto map = NestedMap<S>::natural(6, 3, 1);
  Mat<S> v = Mat<S>::Zero(6, 1);
  v.topRows(3) = gaussian_matrix<S>(3, 1, rng);
  const auto x = orthonormalize<S>(v);
  const auto expected = orthonormalize<S>(Mat<S>(v.topRows(3)));
  EXPECT_LT(angle_between(project_point(map, x), expected), 1e-12);
}

TYPED_TEST(NestedTest, ProjectionIgnoresTheBasis) {
  using S = TypeParam;
  Rng rng(6);
  const auto map = random_map<S>(7, 3, 2, 0.5, rng);
  const auto x = testing::random_point<S>(7, 2, rng);
  const auto xq = testing::with_basis(x, testing::random_unitary<S>(2, rng));
  EXPECT_LT(angle_between(project_point(map, x), project_point(map, xq)), 1e-10);
}

TYPED_TEST(NestedTest, DegenerateProjectionNamesTheSample) {
  using S = TypeParam;
  Rng rng(7);
  const auto map = NestedMap<S>::natural(5, 2, 1);
  std::vector<GrassmannPoint<S>> pts = random_points<S>(3, 5, 1, rng);
  Mat<S> e = Mat<S>::Zero(5, 1);
  e(4, 0) = S(1);
  pts[1] = GrassmannPoint<S>::from_orthonormal(e);
  try {
    project_all<S>(map, pts);
    FAIL() << "expected a degenerate projection";
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::degenerate_input);
    ASSERT_TRUE(err.index().has_value());
    EXPECT_EQ(*err.index(), 1u);
  }
}

// With B != 0, span(A Z + B) depends on the basis chosen for Z, so the two
// routes only agree for B = 0.
TYPED_TEST(NestedTest, ReconstructionEqualsEmbedOfProjection) {
  using S = TypeParam;
  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const auto map = random_map<S>(8, 4, 2, 0.0, rng);
    const auto x = testing::random_point<S>(8, 2, rng);
    const auto r = reconstruct_point(map, x);
    EXPECT_LT(angle_between(r, embed_point(map, project_point(map, x))), 1e-9);
    EXPECT_LT(angle_between(reconstruct_point(map, r), r), 1e-9);
  }
}

TYPED_TEST(NestedTest, ReconstructionFixesEmbeddedPoints) {
  using S = TypeParam;
  Rng rng(9);
  const auto map = random_map<S>(8, 4, 2, 0.0, rng);
  const auto x = embed_point(map, testing::random_point<S>(4, 2, rng));
  EXPECT_LT(angle_between(reconstruct_point(map, x), x), 1e-9);
}

TYPED_TEST(NestedTest, IdentityMapReconstructsEverything) {
  using S = TypeParam;
  Rng rng(10);
  const auto map = NestedMap<S>::make(testing::random_unitary<S>(5, rng), Mat<S>::Zero(5, 2));
  const auto x = testing::random_point<S>(5, 2, rng);
  EXPECT_LT(angle_between(reconstruct_point(map, x), x), 1e-10);
}

// --- unsupervised loss -----------------------------------------------------------------

TYPED_TEST(NestedTest, LossVanishesOnPlantedData) {
  using S = TypeParam;
  SynthConfig cfg;
  cfg.num_points = 20;
  cfg.ambient_dim = 7;
  cfg.planted_dim = 3;
  cfg.subspace_dim = 2;
  cfg.b_std = 0.3;
  cfg.seed = 11;
  const auto data = generate<S>(cfg);
  for (Metric metric : {Metric::projection, Metric::geodesic})
    EXPECT_LT(loss_unsupervised<S>(data.ground_truth, data.points, metric), 1e-20);
}

TYPED_TEST(NestedTest, SinglePointLossMatchesManifoldDistance) {
  using S = TypeParam;
  Rng rng(12);
  const auto map = random_map<S>(6, 3, 1, 0.7, rng);
  const auto x = testing::random_point<S>(6, 1, rng);
  const std::vector<GrassmannPoint<S>> pts{x};
  const auto r = reconstruct_point(map, x);
  const double dg = geodesic_distance(x, r);
  const double dp = projection_distance(x, r);
  EXPECT_NEAR(loss_unsupervised<S>(map, pts, Metric::geodesic), dg * dg, 1e-12);
  EXPECT_NEAR(loss_unsupervised<S>(map, pts, Metric::projection), dp * dp, 1e-12);
}

TYPED_TEST(NestedTest, ProjectionLossBoundedByGeodesicLoss) {
  using S = TypeParam;
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto map = random_map<S>(6, 3, 2, 0.5, rng);
    const auto pts = random_points<S>(10, 6, 2, rng);
    EXPECT_LE(loss_unsupervised<S>(map, pts, Metric::projection),
              loss_unsupervised<S>(map, pts, Metric::geodesic) * (1 + 1e-12));
  }
}

TYPED_TEST(NestedTest, LossHasGaugeAndOffsetInvariance) {
  using S = TypeParam;
  Rng rng(14);
  for (Metric metric : {Metric::projection, Metric::geodesic}) {
    const auto pts = random_points<S>(12, 7, 2, rng);
    const ProductPoint<S> base{testing::random_point<S>(7, 3, rng).basis(), gaussian_matrix<S>(7, 2, rng)};
    const double ref = loss_unsupervised<S>(base, pts, metric).value;
    const ProductPoint<S> rotated{base.a * testing::random_unitary<S>(3, rng), base.b};
    EXPECT_NEAR(loss_unsupervised<S>(rotated, pts, metric).value, ref, 1e-10);
    const ProductPoint<S> shifted{base.a, base.b + base.a * gaussian_matrix<S>(3, 2, rng)};
    EXPECT_NEAR(loss_unsupervised<S>(shifted, pts, metric).value, ref, 1e-10);
  }
}

TYPED_TEST(NestedTest, UnsupervisedGradientMatchesFiniteDifferences) {
  using S = TypeParam;
  Rng rng(15);
  for (Metric metric : {Metric::projection, Metric::geodesic}) {
    SynthConfig cfg;
    cfg.num_points = 8;
    cfg.ambient_dim = 6;
    cfg.planted_dim = 3;
    cfg.subspace_dim = 2;
    cfg.sigma = 0.3;
    cfg.seed = 15;
    const auto pts = generate<S>(cfg).points;
    const ProductPoint<S> x{testing::random_point<S>(6, 3, rng).basis(), Mat<S>(0.3 * gaussian_matrix<S>(6, 2, rng))};
    const LossValue<S> lv = loss_unsupervised<S>(x, pts, metric);
    for (int dir = 0; dir < 20; ++dir) {
      const Mat<S> da = gaussian_matrix<S>(6, 3, rng);
      const Mat<S> db = gaussian_matrix<S>(6, 2, rng);
      const auto f = [&](double h) {
        return loss_unsupervised<S>(ProductPoint<S>{x.a + h * da, x.b + h * db}, pts, metric).value;
      };
      const double analytic = real_inner<S>(lv.grad_a, da) + real_inner<S>(lv.grad_b, db);
      EXPECT_LT(directional_error(f, analytic), 1e-5) << to_string(metric) << " direction " << dir;
    }
  }
}

// --- affinity ---------------------------------------------------------------------

TEST(AffinityTest, TwoPairsByHand) {
  // Points 0, 1 (class 0) near 0; points 2, 3 (class 1) near 1. The nearest
  // other-class point is 2 for both 0 and 1, and 1 for both 2 and 3.
  const std::vector<double> pos{0.0, 0.1, 0.9, 1.0};
  RealMat d(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) d(i, j) = std::abs(pos[i] - pos[j]);
  const std::vector<int> labels{0, 0, 1, 1};
  const AffinityMatrix a = build_affinity(labels, d, 1, 1);
  RealMat expected(4, 4);
  expected << 0, 1, -1, 0,
              1, 0, -1, -1,
              -1, -1, 0, 1,
              0, -1, 1, 0;
  EXPECT_EQ(a.values, expected);
  EXPECT_TRUE(a.rows_without_positive.empty());
}

TEST(AffinityTest, OneClassHasNoNegatives) {
  Rng rng(16);
  RealMat g = RealMat::Random(6, 6).cwiseAbs();
  const RealMat d = g + g.transpose();
  const std::vector<int> labels(6, 3);
  const AffinityMatrix a = build_affinity(labels, d, 2, 2);
  EXPECT_GE(a.values.minCoeff(), 0.0);
  EXPECT_EQ(a.values, a.values.transpose());
  EXPECT_EQ(a.values.diagonal().cwiseAbs().sum(), 0.0);
}

TEST(AffinityTest, SaturatedNeighbourhoods) {
  RealMat g = RealMat::Random(7, 7).cwiseAbs();
  const RealMat d = g + g.transpose();
  const std::vector<int> labels{0, 1, 0, 2, 1, 0, 2};
  const AffinityMatrix a = build_affinity(labels, d, 7, 7);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) EXPECT_EQ(a.values(i, j), i == j ? 0.0 : (labels[i] == labels[j] ? 1.0 : -1.0));
}

TEST(AffinityTest, SingletonClassIsReported) {
  RealMat g = RealMat::Random(4, 4).cwiseAbs();
  const RealMat d = g + g.transpose();
  const std::vector<int> labels{0, 0, 0, 1};
  const AffinityMatrix a = build_affinity(labels, d, 1, 1);
  ASSERT_EQ(a.rows_without_positive.size(), 1u);
  EXPECT_EQ(a.rows_without_positive.front(), 3u);
}

// --- supervised loss ----------------------------------------------------------------

TYPED_TEST(NestedTest, SupervisedLossWithZeroAffinityIsZero) {
  using S = TypeParam;
  Rng rng(17);
  const auto pts = random_points<S>(5, 6, 1, rng);
  const AffinityMatrix zero{RealMat::Zero(5, 5), {}};
  const auto lv = loss_supervised<S>(testing::random_point<S>(6, 3, rng).basis(), pts, zero, Metric::projection);
  EXPECT_EQ(lv.value, 0.0);
  EXPECT_EQ(lv.grad_a.norm(), 0.0);
}

TYPED_TEST(NestedTest, SupervisedLossTwoPointsByHand) {
  using S = TypeParam;
  Rng rng(18);
  const auto pts = random_points<S>(2, 6, 2, rng);
  const auto a = testing::random_point<S>(6, 3, rng).basis();
  RealMat aff(2, 2);
  aff << 0, 1, 1, 0;
  const auto map = NestedMap<S>::make(a, Mat<S>::Zero(6, 2));
  for (Metric metric : {Metric::projection, Metric::geodesic}) {
    const double d = distance(project_point(map, pts[0]), project_point(map, pts[1]), metric);
    EXPECT_NEAR(loss_supervised<S>(a, pts, AffinityMatrix{aff, {}}, metric).value, 2 * d * d / 4, 1e-12);
  }
}

TYPED_TEST(NestedTest, SupervisedLossIsPermutationInvariant) {
  using S = TypeParam;
  Rng rng(19);
  const auto pts = random_points<S>(8, 6, 1, rng);
  const std::vector<int> labels{0, 1, 0, 1, 1, 0, 0, 1};
  const auto a = testing::random_point<S>(6, 3, rng).basis();
  const AffinityMatrix aff = build_affinity(labels, distance_matrix<S>(pts, Metric::projection), 2, 2);
  const double ref = loss_supervised<S>(a, pts, aff, Metric::projection).value;

  std::vector<std::size_t> perm{3, 7, 0, 5, 1, 6, 2, 4};
  std::vector<GrassmannPoint<S>> shuffled;
  AffinityMatrix paff{RealMat(8, 8), {}};
  for (std::size_t i = 0; i < 8; ++i) {
    shuffled.push_back(pts[perm[i]]);
    for (std::size_t j = 0; j < 8; ++j)
      paff.values(static_cast<Index>(i), static_cast<Index>(j)) =
          aff.values(static_cast<Index>(perm[i]), static_cast<Index>(perm[j]));
  }
  EXPECT_NEAR(loss_supervised<S>(a, shuffled, paff, Metric::projection).value, ref, 1e-12);
}

TYPED_TEST(NestedTest, SupervisedGradientMatchesFiniteDifferences) {
  using S = TypeParam;
  Rng rng(20);
  const auto pts = random_points<S>(10, 6, 2, rng);
  std::vector<int> labels;
  for (int i = 0; i < 10; ++i) labels.push_back(i % 2);
  const AffinityMatrix aff = build_affinity(labels, distance_matrix<S>(pts, Metric::projection), 2, 2);
  for (Metric metric : {Metric::projection, Metric::geodesic}) {
    const Mat<S> a = testing::random_point<S>(6, 3, rng).basis();
    const LossValue<S> lv = loss_supervised<S>(a, pts, aff, metric);
    for (int dir = 0; dir < 20; ++dir) {
      const Mat<S> da = gaussian_matrix<S>(6, 3, rng);
      const auto f = [&](double h) { return loss_supervised<S>(Mat<S>(a + h * da), pts, aff, metric).value; };
      EXPECT_LT(directional_error(f, real_inner<S>(lv.grad_a, da)), 1e-5) << to_string(metric) << " direction " << dir;
    }
  }
}

// --- variance -------------------------------------------------------------------------

TYPED_TEST(NestedTest, IdenticalPointsHaveUndefinedRatio) {
  using S = TypeParam;
  Rng rng(21);
  const auto x = testing::random_point<S>(5, 1, rng);
  const std::vector<GrassmannPoint<S>> pts(4, x);
  EXPECT_EQ(variance<S>(pts), 0.0);
  try {
    explained_variance_ratio<S>(NestedMap<S>::natural(5, 3, 1), pts);
    FAIL() << "expected an undefined-ratio error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::undefined_ratio);
  }
}

TYPED_TEST(NestedTest, UnitaryMapExplainsEverything) {
  using S = TypeParam;
  Rng rng(22);
  const auto pts = random_points<S>(15, 5, 2, rng);
  const auto map = NestedMap<S>::make(testing::random_unitary<S>(5, rng), Mat<S>::Zero(5, 2));
  EXPECT_NEAR(explained_variance_ratio<S>(map, pts), 1.0, 1e-9);
}

// --- fitting ------------------------------------------------------------------------

TYPED_TEST(NestedTest, NoiselessFitRecoversThePlantedSubmanifold) {
  using S = TypeParam;
  SynthConfig cfg;
  cfg.num_points = 30;
  cfg.ambient_dim = 8;
  cfg.planted_dim = 3;
  cfg.subspace_dim = 1;
  cfg.b_std = 0.0;
  cfg.seed = 23;
  const auto data = generate<S>(cfg);
  Rng rng(23);
  const auto report = fit_unsupervised<S>(data.points, 3, FitConfig{}, rng);
  EXPECT_LT(report.final_loss, 1e-6);
  EXPECT_LT(report.final_loss, 1e-8);
  EXPECT_GT(report.explained_variance_ratio, 0.999);
  for (std::size_t k = 1; k < report.loss_trace.size(); ++k) EXPECT_LE(report.loss_trace[k], report.loss_trace[k - 1]);
  EXPECT_LT((report.map.a().adjoint() * report.map.b()).norm(), 1e-8);
}

TYPED_TEST(NestedTest, NoiselessFitWithOffsetReachesZeroLoss) {
  using S = TypeParam;
  SynthConfig cfg;
  cfg.num_points = 30;
  cfg.ambient_dim = 8;
  cfg.planted_dim = 3;
  cfg.subspace_dim = 1;
  cfg.seed = 24;
  const auto data = generate<S>(cfg);
  Rng rng(24);
  const auto report = fit_unsupervised<S>(data.points, 3, FitConfig{}, rng);
  EXPECT_LT(report.final_loss, 1e-6);
}

TYPED_TEST(NestedTest, FullDimensionFitExplainsEverything) {
  using S = TypeParam;
  Rng rng(25);
  const auto pts = random_points<S>(12, 5, 2, rng);
  const auto report = fit_unsupervised<S>(pts, 5, FitConfig{}, rng);
  EXPECT_NEAR(report.explained_variance_ratio, 1.0, 1e-9);
}

TYPED_TEST(NestedTest, FitRejectsBadDimensions) {
  using S = TypeParam;
  Rng rng(26);
  const auto pts = random_points<S>(6, 5, 2, rng);
  EXPECT_THROW(fit_unsupervised<S>(pts, 2, FitConfig{}, rng), Error);
  EXPECT_THROW(fit_unsupervised<S>(pts, 6, FitConfig{}, rng), Error);
}

TYPED_TEST(NestedTest, SupervisedFitNeedsTwoClasses) {
  using S = TypeParam;
  Rng rng(27);
  const auto pts = random_points<S>(6, 5, 1, rng);
  const std::vector<int> labels(6, 1);
  try {
    fit_supervised<S>(pts, labels, 2, AffinityConfig{}, FitConfig{}, rng);
    FAIL() << "expected a supervision error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::supervision);
  }
}

TYPED_TEST(NestedTest, SupervisedFitWithZeroAffinityReturnsTheStart) {
  using S = TypeParam;
  Rng rng(28);
  const auto pts = random_points<S>(8, 5, 1, rng);
  const std::vector<int> labels{0, 1, 0, 1, 0, 1, 0, 1};
  const auto report = fit_supervised<S>(pts, labels, 2, AffinityConfig{0, 0}, FitConfig{}, rng);
  EXPECT_EQ(report.final_loss, 0.0);
  ASSERT_EQ(report.loss_trace.size(), 1u);
  EXPECT_EQ(report.map.b().norm(), 0.0);
}

TYPED_TEST(NestedTest, SupervisedFitIgnoresLabelNames) {
  using S = TypeParam;
  SynthConfig cfg;
  cfg.num_points = 16;
  cfg.ambient_dim = 5;
  cfg.planted_dim = 3;
  cfg.subspace_dim = 1;
  cfg.sigma = 0.2;
  cfg.seed = 29;
  const auto data = generate_two_class<S>(cfg, 0.3);
  std::vector<int> renamed;
  for (int l : data.labels) renamed.push_back(l == 0 ? 7 : -3);
  Rng r1(29), r2(29);
  const auto a = fit_supervised<S>(data.data.points, data.labels, 2, AffinityConfig{3, 3}, FitConfig{}, r1);
  const auto b = fit_supervised<S>(data.data.points, renamed, 2, AffinityConfig{3, 3}, FitConfig{}, r2);
  EXPECT_EQ(a.loss_trace, b.loss_trace);
}

TYPED_TEST(NestedTest, SequenceContract) {
  using S = TypeParam;
  SynthConfig cfg;
  cfg.num_points = 20;
  cfg.ambient_dim = 6;
  cfg.planted_dim = 3;
  cfg.subspace_dim = 1;
  cfg.seed = 30;
  const auto data = generate<S>(cfg);
  Rng rng(30);
  const std::vector<Index> none;
  EXPECT_TRUE(nested_sequence<S>(data.points, none, FitConfig{}, rng).empty());

  const std::vector<Index> top{5};
  const auto seq = nested_sequence<S>(data.points, top, FitConfig{}, rng);
  ASSERT_EQ(seq.size(), 1u);
  ASSERT_TRUE(seq[0].ratio.has_value());
  EXPECT_NEAR(*seq[0].ratio, 1.0, 0.05);

  const std::vector<Index> unsorted{4, 3};
  EXPECT_THROW(nested_sequence<S>(data.points, unsorted, FitConfig{}, rng), Error);
}

}  // namespace
}  // namespace ngr
