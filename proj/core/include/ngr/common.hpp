#pragma once

#include <complex>
#include <concepts>
#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include <Eigen/Dense>

namespace ngr {

using Complex = std::complex<double>;

/// Scalar field of the ambient vector space.
enum class Field { real, complex };

template <class S>
concept FieldScalar = std::same_as<S, double> || std::same_as<S, Complex>;

template <FieldScalar S>
inline constexpr Field field_of = std::same_as<S, double> ? Field::real : Field::complex;

/// Real degrees of freedom carried by one scalar entry.
template <FieldScalar S>
inline constexpr int real_dof = std::same_as<S, double> ? 1 : 2;

template <FieldScalar S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <FieldScalar S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;
using RealMat = Mat<double>;
using RealVec = Vec<double>;
using Index = Eigen::Index;

std::string_view to_string(Field f);
Field parse_field(std::string_view s);

/// Random source used by every stochastic routine. Callers own and seed it.
using Rng = std::mt19937_64;

/// Library-wide numerical tolerances. Defaults follow the documented
/// contracts; every routine that uses them accepts an override.
struct Tolerances {
  double orthonormality = 1e-12;   // ||X^H X - I||_max for stored bases
  double rank = 1e-12;             // sigma_min / sigma_max below this is rank deficient
  double tangent = 1e-10;          // ||X^H H|| for stored tangent vectors
  double exp_tangent = 1e-8;       // ||X^H H|| accepted by exp_map
  double same_point_angle = 1e-9;  // max principal angle for point equality
  double cut_locus = 1e-6;         // distance of the largest angle from pi/2
  double load_drift = 1e-6;        // orthonormality drift repaired on load
};

// Error taxonomy. Every error carries an optional data index so batch
// routines can name the offending sample.
enum class ErrorKind {
  degenerate_input,
  shape,
  invalid_tangent,
  cut_locus,
  convergence,
  undefined_ratio,
  supervision,
  parse,
  usage,
};

std::string_view to_string(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, std::optional<std::size_t> index = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

  /// Same error, tagged with the index of the sample that produced it.
  Error with_index(std::size_t i) const;

 private:
  ErrorKind kind_;
  std::optional<std::size_t> index_;
};

/// Convergence failure. Subclasses carry the best iterate reached.
class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(const std::string& what) : Error(ErrorKind::convergence, what) {}
};

template <class Payload>
class ConvergenceErrorWith : public ConvergenceError {
 public:
  ConvergenceErrorWith(const std::string& what, Payload best)
      : ConvergenceError(what), best_(std::move(best)) {}
  const Payload& best() const noexcept { return best_; }

 private:
  Payload best_;
};

[[noreturn]] void throw_shape(const std::string& what);

/// Pairwise (tree) summation; result is independent of how a caller
/// partitions the work as long as the input order is fixed.
double pairwise_sum(std::span<const double> values);

/// Standard Gaussian n x p matrix; complex entries have E|z|^2 = 1.
template <FieldScalar S>
Mat<S> gaussian_matrix(Index rows, Index cols, Rng& rng);

/// Real inner product Re tr(A^H B).
template <FieldScalar S>
double real_inner(const Mat<S>& a, const Mat<S>& b) {
  return std::real((a.adjoint() * b).trace());
}

}  // namespace ngr
