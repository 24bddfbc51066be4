#include "ngr/datagen.hpp"

namespace ngr {

void SynthConfig::validate() const {
  if (num_points < 1) throw Error(ErrorKind::usage, "synthetic config: N must be at least 1");
  if (!(1 <= subspace_dim && subspace_dim <= planted_dim && planted_dim < ambient_dim))
    throw Error(ErrorKind::usage, "synthetic config: need 1 <= p <= m < n");
  if (!(sigma >= 0.0)) throw Error(ErrorKind::usage, "synthetic config: sigma must be nonnegative");
  if (!(b_std >= 0.0)) throw Error(ErrorKind::usage, "synthetic config: b_std must be nonnegative");
}

namespace {

template <FieldScalar S>
SynthData<S> embed_and_perturb(const SynthConfig& config, std::vector<GrassmannPoint<S>> planted,
                               const Mat<S>& a, const Mat<S>& b_tilde, Rng& rng) {
  NestedMap<S> truth = NestedMap<S>::make(a, b_tilde);
  std::vector<GrassmannPoint<S>> clean;
  std::vector<GrassmannPoint<S>> points;
  clean.reserve(planted.size());
  points.reserve(planted.size());
  for (std::size_t i = 0; i < planted.size(); ++i) {
    try {
      GrassmannPoint<S> tilde = embed_point(truth, planted[i]);
      const TangentVector<S> u = random_unit_tangent(tilde, rng);
      points.push_back(config.sigma == 0.0 ? tilde : exp_map(tilde, Mat<S>(config.sigma * u.mat())));
      clean.push_back(std::move(tilde));
    } catch (const Error& e) {
      throw e.with_index(i);
    }
  }
  // Every clean basis is (A Z + B) R^-1 with the same R (chol of I + B^H B,
  // since Z^H Z = I and A^H B = 0), so B R^-1 is the offset that reconstructs
  // the stored bases exactly.
  const Index p = truth.subspace_dim();
  const Mat<S> gram = Mat<S>::Identity(p, p) + truth.b().adjoint() * truth.b();
  const Mat<S> r = gram.llt().matrixU();
  const Mat<S> b_rep = r.adjoint().template triangularView<Eigen::Lower>().solve(truth.b().adjoint()).adjoint();
  NestedMap<S> ground_truth = NestedMap<S>::make(a, b_rep);
  return {std::move(points), std::move(planted), std::move(clean), std::move(ground_truth)};
}

}  // namespace

template <FieldScalar S>
SynthData<S> generate(const SynthConfig& config) {
  config.validate();
  Rng rng(config.seed);
  const Index n = config.ambient_dim;
  const Index m = config.planted_dim;
  const Index p = config.subspace_dim;

  std::vector<GrassmannPoint<S>> planted;
  planted.reserve(static_cast<std::size_t>(config.num_points));
  for (Index i = 0; i < config.num_points; ++i) planted.push_back(sample_stiefel_uniform<S>(m, p, rng));
  const Mat<S> a = sample_stiefel_uniform<S>(n, m, rng).basis();
  const Mat<S> b = config.b_std * gaussian_matrix<S>(n, p, rng);
  return embed_and_perturb<S>(config, std::move(planted), a, b, rng);
}

template <FieldScalar S>
LabeledSynthData<S> generate_two_class(const SynthConfig& config, double class_spread) {
  config.validate();
  if (!(class_spread >= 0.0)) throw Error(ErrorKind::usage, "class_spread must be nonnegative");
  Rng rng(config.seed);
  const Index n = config.ambient_dim;
  const Index m = config.planted_dim;
  const Index p = config.subspace_dim;

  const GrassmannPoint<S> centres[2] = {sample_stiefel_uniform<S>(m, p, rng), sample_stiefel_uniform<S>(m, p, rng)};
  std::vector<GrassmannPoint<S>> planted;
  std::vector<int> labels;
  for (Index i = 0; i < config.num_points; ++i) {
    const int label = static_cast<int>(i % 2);
    const TangentVector<S> u = random_unit_tangent(centres[label], rng);
    planted.push_back(exp_map(centres[label], Mat<S>(class_spread * u.mat())));
    labels.push_back(label);
  }
  const Mat<S> a = sample_stiefel_uniform<S>(n, m, rng).basis();
  const Mat<S> b = config.b_std * gaussian_matrix<S>(n, p, rng);
  return {embed_and_perturb<S>(config, std::move(planted), a, b, rng), std::move(labels)};
}

#define NGR_INSTANTIATE(S)                                        \
  template SynthData<S> generate<S>(const SynthConfig&);          \
  template LabeledSynthData<S> generate_two_class<S>(const SynthConfig&, double);

NGR_INSTANTIATE(double)
NGR_INSTANTIATE(Complex)

#undef NGR_INSTANTIATE

}  // namespace ngr
