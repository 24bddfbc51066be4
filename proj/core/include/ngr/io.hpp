#pragma once

// On-disk formats: datasets and models as JSON documents (matrices as
// row-major nested arrays, complex entries as [re, im]), landmark files as
// CSV or JSON.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ngr/nested.hpp"
#include "ngr/shape.hpp"

namespace ngr {

inline constexpr std::string_view kDatasetFormat = "ngr-dataset";
inline constexpr std::string_view kModelFormat = "ngr-model";

std::string_view tool_version() noexcept;

template <FieldScalar S>
struct Dataset {
  std::vector<GrassmannPoint<S>> points;
  std::optional<std::vector<int>> labels;
};

using AnyDataset = std::variant<Dataset<double>, Dataset<Complex>>;

struct ModelMetadata {
  std::optional<double> loss;
  std::optional<std::uint64_t> seed;
  std::string metric;
  bool supervised = false;
  std::string tool_version;
};

template <FieldScalar S>
struct Model {
  NestedMap<S> map;
  ModelMetadata metadata;
};

using AnyModel = std::variant<Model<double>, Model<Complex>>;

struct LandmarkSet {
  std::vector<KAds> shapes;
  std::optional<std::vector<int>> labels;
};

/// Parse errors carry the source name and a line (syntax) or record
/// (content) position. Bases that drift from orthonormality by at most
/// `Tolerances::load_drift` are re-orthonormalized; larger drift is rejected.
AnyDataset parse_dataset(std::string_view text, const std::string& source = "<memory>");
AnyDataset read_dataset(const std::filesystem::path& path);

template <FieldScalar S>
std::string format_dataset(const Dataset<S>& data);
template <FieldScalar S>
void write_dataset(const std::filesystem::path& path, const Dataset<S>& data);

AnyModel parse_model(std::string_view text, const std::string& source = "<memory>");
AnyModel read_model(const std::filesystem::path& path);

template <FieldScalar S>
std::string format_model(const Model<S>& model);
template <FieldScalar S>
void write_model(const std::filesystem::path& path, const Model<S>& model);

/// JSON ({"shapes": [{"label": 0, "points": [[x, y], ...]}, ...]}) when the
/// first non-blank character is '{', otherwise CSV with one shape per line:
/// x1,y1,...,xk,yk, optionally preceded by an integer label (odd field
/// count). Blank lines and lines starting with '#' are skipped.
LandmarkSet parse_landmarks(std::string_view text, const std::string& source = "<memory>");
LandmarkSet read_landmarks(const std::filesystem::path& path);
std::string format_landmarks_csv(const LandmarkSet& set);

std::string read_text_file(const std::filesystem::path& path);
/// Writes via a temporary file in the same directory, then renames.
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

}  // namespace ngr
