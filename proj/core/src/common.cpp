#include "ngr/common.hpp"

#include <cmath>

namespace ngr {

std::string_view to_string(Field f) { return f == Field::real ? "real" : "complex"; }

Field parse_field(std::string_view s) {
  if (s == "real") return Field::real;
  if (s == "complex") return Field::complex;
  throw Error(ErrorKind::parse, "unknown field '" + std::string(s) + "' (expected real|complex)");
}

std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::degenerate_input: return "degenerate-input";
    case ErrorKind::shape: return "shape";
    case ErrorKind::invalid_tangent: return "invalid-tangent";
    case ErrorKind::cut_locus: return "cut-locus";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::undefined_ratio: return "undefined-ratio";
    case ErrorKind::supervision: return "supervision-degenerate";
    case ErrorKind::parse: return "parse";
    case ErrorKind::usage: return "usage";
  }
  return "unknown";
}

namespace {
std::string decorate(const std::string& what, std::optional<std::size_t> index) {
  if (!index) return what;
  return what + " (data index " + std::to_string(*index) + ")";
}
}  // namespace

Error::Error(ErrorKind kind, const std::string& what, std::optional<std::size_t> index)
    : std::runtime_error(decorate(what, index)), kind_(kind), index_(index) {}

Error Error::with_index(std::size_t i) const {
  if (index_) return *this;
  return Error(kind_, what(), i);
}

void throw_shape(const std::string& what) { throw Error(ErrorKind::shape, what); }

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kLeaf = 8;
  if (values.size() <= kLeaf) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

template <>
Mat<double> gaussian_matrix<double>(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat<double> m(rows, cols);
  // Column-major fill order is part of the determinism contract.
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

template <>
Mat<Complex> gaussian_matrix<Complex>(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, M_SQRT1_2);
  Mat<Complex> m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      m(i, j) = Complex(re, im);
    }
  return m;
}

}  // namespace ngr
