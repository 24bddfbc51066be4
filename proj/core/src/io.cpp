#include "ngr/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "json.hpp"

#ifndef NGR_VERSION
#define NGR_VERSION "0.0.0"
#endif

namespace ngr {

using Json = nlohmann::ordered_json;

std::string_view tool_version() noexcept { return NGR_VERSION; }

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::parse, "cannot open " + path.string() + " for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::usage, "cannot open " + path.string() + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(ErrorKind::usage, "failed writing " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorKind::usage, "cannot replace " + path.string());
  }
}

namespace {

[[noreturn]] void parse_fail(const std::string& source, const std::string& where, const std::string& what) {
  throw Error(ErrorKind::parse, source + ": " + where + ": " + what);
}

std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

Json parse_json(std::string_view text, const std::string& source) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    // e.byte is one past the offending character.
    const auto [line, col] = line_and_column(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string msg = e.what();
    if (const auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
    parse_fail(source, "line " + std::to_string(line) + ", column " + std::to_string(col), msg);
  }
}

const Json& member(const Json& obj, const char* key, const std::string& source, const std::string& where) {
  if (!obj.is_object()) parse_fail(source, where, "expected a JSON object");
  const auto it = obj.find(key);
  if (it == obj.end()) parse_fail(source, where, std::string("missing field \"") + key + "\"");
  return *it;
}

Index read_dim(const Json& obj, const char* key, const std::string& source, Index min_value) {
  const Json& v = member(obj, key, source, "header");
  if (!v.is_number_integer() || v.get<std::int64_t>() < min_value)
    parse_fail(source, "header", std::string("\"") + key + "\" must be an integer >= " + std::to_string(min_value));
  return static_cast<Index>(v.get<std::int64_t>());
}

Field read_field(const Json& obj, const std::string& source) {
  const Json& v = member(obj, "field", source, "header");
  if (!v.is_string()) parse_fail(source, "header", "\"field\" must be \"real\" or \"complex\"");
  try {
    return parse_field(v.get<std::string>());
  } catch (const Error&) {
    parse_fail(source, "header", "\"field\" must be \"real\" or \"complex\", got \"" + v.get<std::string>() + "\"");
  }
}

void check_format(const Json& doc, std::string_view expected, const std::string& source) {
  const Json& v = member(doc, "format", source, "header");
  if (!v.is_string() || v.get<std::string>() != expected)
    parse_fail(source, "header", "not an " + std::string(expected) + " document");
}

template <FieldScalar S>
S read_entry(const Json& v, const std::string& source, const std::string& where) {
  if constexpr (std::same_as<S, Complex>) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      parse_fail(source, where, "complex entries must be [re, im] pairs of numbers");
    return {v[0].get<double>(), v[1].get<double>()};
  } else {
    if (!v.is_number()) parse_fail(source, where, "real entries must be numbers");
    return v.get<double>();
  }
}

template <FieldScalar S>
Mat<S> read_matrix(const Json& v, Index rows, Index cols, const std::string& source, const std::string& where) {
  if (!v.is_array() || static_cast<Index>(v.size()) != rows)
    parse_fail(source, where, "expected " + std::to_string(rows) + " rows");
  Mat<S> out(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const Json& row = v[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols)
      parse_fail(source, where, "row " + std::to_string(r) + ": expected " + std::to_string(cols) + " entries");
    for (Index c = 0; c < cols; ++c)
      out(r, c) = read_entry<S>(row[static_cast<std::size_t>(c)], source,
                                where + ", row " + std::to_string(r) + ", column " + std::to_string(c));
  }
  if (!out.allFinite()) parse_fail(source, where, "non-finite entry");
  return out;
}

template <FieldScalar S>
Json write_entry(const S& v) {
  if constexpr (std::same_as<S, Complex>) {
    return Json::array({v.real(), v.imag()});
  } else {
    return v;
  }
}

template <FieldScalar S>
Json write_matrix(const Mat<S>& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(write_entry<S>(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

// Accepts exact bases, repairs small drift, rejects the rest.
template <FieldScalar S>
GrassmannPoint<S> load_basis(const Mat<S>& m, const std::string& source, const std::string& where) {
  const Tolerances tol;
  const double defect =
      (m.adjoint() * m - Mat<S>::Identity(m.cols(), m.cols())).cwiseAbs().maxCoeff();
  if (defect <= tol.orthonormality) return GrassmannPoint<S>::from_orthonormal(m, tol);
  if (defect <= tol.load_drift) {
    try {
      return orthonormalize<S>(m, tol);
    } catch (const Error& e) {
      parse_fail(source, where, e.what());
    }
  }
  parse_fail(source, where,
             "basis is not orthonormal (max |X^H X - I| = " + format_double(defect) + " exceeds " +
                 format_double(tol.load_drift) + ")");
}

std::optional<std::vector<int>> read_labels(const Json& doc, std::size_t count, const std::string& source) {
  const auto it = doc.find("labels");
  if (it == doc.end() || it->is_null()) return std::nullopt;
  if (!it->is_array() || it->size() != count)
    parse_fail(source, "labels", "expected an array of " + std::to_string(count) + " integers");
  std::vector<int> labels;
  for (std::size_t i = 0; i < count; ++i) {
    const Json& v = (*it)[i];
    if (!v.is_number_integer()) parse_fail(source, "labels[" + std::to_string(i) + "]", "labels must be integers");
    labels.push_back(v.get<int>());
  }
  return labels;
}

template <FieldScalar S>
Dataset<S> parse_dataset_body(const Json& doc, Index n, Index p, Index count, const std::string& source) {
  const Json& pts = member(doc, "points", source, "header");
  if (!pts.is_array() || static_cast<Index>(pts.size()) != count)
    parse_fail(source, "points", "expected " + std::to_string(count) + " records (N)");
  Dataset<S> out;
  out.points.reserve(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) {
    const std::string where = "record " + std::to_string(i);
    const Mat<S> basis = read_matrix<S>(pts[static_cast<std::size_t>(i)], n, p, source, where);
    out.points.push_back(load_basis<S>(basis, source, where));
  }
  out.labels = read_labels(doc, static_cast<std::size_t>(count), source);
  return out;
}

template <FieldScalar S>
Model<S> parse_model_body(const Json& doc, Index n, Index m, Index p, const std::string& source) {
  Mat<S> a = read_matrix<S>(member(doc, "A", source, "header"), n, m, source, "A");
  const Mat<S> b = read_matrix<S>(member(doc, "B", source, "header"), n, p, source, "B");
  const Tolerances tol;
  const double defect = (a.adjoint() * a - Mat<S>::Identity(m, m)).cwiseAbs().maxCoeff();
  if (defect > tol.load_drift)
    parse_fail(source, "A", "columns are not orthonormal (max |A^H A - I| = " + format_double(defect) + ")");
  if (defect > tol.orthonormality) a = orthonormalize<S>(a, tol).basis();
  const double cross = (a.adjoint() * b).cwiseAbs().maxCoeff();
  if (cross > tol.load_drift) parse_fail(source, "B", "A^H B is not zero (max entry " + format_double(cross) + ")");

  Model<S> out{NestedMap<S>::make(std::move(a), b), {}};
  if (const auto it = doc.find("metadata"); it != doc.end() && it->is_object()) {
    const Json& md = *it;
    if (auto f = md.find("loss"); f != md.end() && f->is_number()) out.metadata.loss = f->get<double>();
    if (auto f = md.find("seed"); f != md.end() && f->is_number_unsigned()) out.metadata.seed = f->get<std::uint64_t>();
    if (auto f = md.find("metric"); f != md.end() && f->is_string()) out.metadata.metric = f->get<std::string>();
    if (auto f = md.find("supervised"); f != md.end() && f->is_boolean()) out.metadata.supervised = f->get<bool>();
    if (auto f = md.find("tool_version"); f != md.end() && f->is_string())
      out.metadata.tool_version = f->get<std::string>();
  }
  return out;
}

std::string dump(const Json& doc) { return doc.dump(1) + "\n"; }

}  // namespace

AnyDataset parse_dataset(std::string_view text, const std::string& source) {
  const Json doc = parse_json(text, source);
  check_format(doc, kDatasetFormat, source);
  const Field field = read_field(doc, source);
  const Index n = read_dim(doc, "n", source, 1);
  const Index p = read_dim(doc, "p", source, 1);
  const Index count = read_dim(doc, "N", source, 0);
  if (p > n) parse_fail(source, "header", "p must not exceed n");
  if (field == Field::real) return parse_dataset_body<double>(doc, n, p, count, source);
  return parse_dataset_body<Complex>(doc, n, p, count, source);
}

AnyDataset read_dataset(const std::filesystem::path& path) { return parse_dataset(read_text_file(path), path.string()); }

template <FieldScalar S>
std::string format_dataset(const Dataset<S>& data) {
  if (data.labels && data.labels->size() != data.points.size())
    throw Error(ErrorKind::usage, "dataset labels do not match the number of points");
  const Index n = data.points.empty() ? 0 : data.points.front().ambient_dim();
  const Index p = data.points.empty() ? 0 : data.points.front().dim();
  Json doc;
  doc["format"] = kDatasetFormat;
  doc["version"] = 1;
  doc["field"] = to_string(field_of<S>);
  doc["n"] = n;
  doc["p"] = p;
  doc["N"] = data.points.size();
  if (data.labels) doc["labels"] = *data.labels;
  Json pts = Json::array();
  for (const auto& x : data.points) {
    if (x.ambient_dim() != n || x.dim() != p) throw_shape("dataset points must share one Gr(p, n)");
    pts.push_back(write_matrix<S>(x.basis()));
  }
  doc["points"] = std::move(pts);
  return dump(doc);
}

template <FieldScalar S>
void write_dataset(const std::filesystem::path& path, const Dataset<S>& data) {
  write_text_file(path, format_dataset(data));
}

AnyModel parse_model(std::string_view text, const std::string& source) {
  const Json doc = parse_json(text, source);
  check_format(doc, kModelFormat, source);
  const Field field = read_field(doc, source);
  const Index n = read_dim(doc, "n", source, 1);
  const Index m = read_dim(doc, "m", source, 1);
  const Index p = read_dim(doc, "p", source, 1);
  if (!(p <= m && m <= n)) parse_fail(source, "header", "dimensions must satisfy p <= m <= n");
  if (field == Field::real) return parse_model_body<double>(doc, n, m, p, source);
  return parse_model_body<Complex>(doc, n, m, p, source);
}

AnyModel read_model(const std::filesystem::path& path) { return parse_model(read_text_file(path), path.string()); }

template <FieldScalar S>
std::string format_model(const Model<S>& model) {
  const NestedMap<S>& map = model.map;
  Json doc;
  doc["format"] = kModelFormat;
  doc["version"] = 1;
  doc["field"] = to_string(field_of<S>);
  doc["n"] = map.ambient_dim();
  doc["m"] = map.reduced_dim();
  doc["p"] = map.subspace_dim();
  doc["A"] = write_matrix<S>(map.a());
  doc["B"] = write_matrix<S>(map.b());
  Json md = Json::object();
  if (model.metadata.loss) md["loss"] = *model.metadata.loss;
  if (model.metadata.seed) md["seed"] = *model.metadata.seed;
  if (!model.metadata.metric.empty()) md["metric"] = model.metadata.metric;
  md["supervised"] = model.metadata.supervised;
  md["tool_version"] = model.metadata.tool_version.empty() ? std::string(tool_version()) : model.metadata.tool_version;
  doc["metadata"] = std::move(md);
  return dump(doc);
}

template <FieldScalar S>
void write_model(const std::filesystem::path& path, const Model<S>& model) {
  write_text_file(path, format_model(model));
}

// ---------------------------------------------------------------------------
// Landmarks

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

void add_shape(LandmarkSet& set, KAds shape, std::optional<int> label, const std::string& source,
               const std::string& where) {
  if (shape.size() <= 2) parse_fail(source, where, "a shape needs more than two landmarks");
  if (!set.shapes.empty() && shape.size() != set.shapes.front().size())
    parse_fail(source, where,
               "inconsistent landmark count: " + std::to_string(shape.size()) + " vs " +
                   std::to_string(set.shapes.front().size()) + " in the first shape");
  const bool first = set.shapes.empty();
  if (first && label) set.labels.emplace();
  if (label.has_value() != set.labels.has_value())
    parse_fail(source, where, "either every shape or no shape must carry a label");
  if (label) set.labels->push_back(*label);
  set.shapes.push_back(std::move(shape));
}

LandmarkSet parse_landmarks_csv(std::string_view text, const std::string& source) {
  LandmarkSet set;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find('\n', start), text.size());
    const std::string_view line = trim(text.substr(start, end - start));
    ++line_no;
    start = end + 1;
    if (line.empty() || line.front() == '#') continue;
    const std::string where = "line " + std::to_string(line_no);

    std::vector<std::string_view> fields;
    std::size_t s = 0;
    for (;;) {
      const auto comma = line.find(',', s);
      fields.push_back(line.substr(s, comma == std::string_view::npos ? std::string_view::npos : comma - s));
      if (comma == std::string_view::npos) break;
      s = comma + 1;
    }
    std::optional<int> label;
    std::size_t first = 0;
    if (fields.size() % 2 == 1) {
      int v = 0;
      if (!parse_number(fields[0], v)) parse_fail(source, where, "label must be an integer");
      label = v;
      first = 1;
    }
    KAds shape;
    shape.points.resize(static_cast<Index>((fields.size() - first) / 2), 2);
    for (std::size_t f = first; f < fields.size(); ++f) {
      double v = 0.0;
      if (!parse_number(fields[f], v) || !std::isfinite(v))
        parse_fail(source, where + ", field " + std::to_string(f + 1), "not a finite number");
      shape.points(static_cast<Index>((f - first) / 2), static_cast<Index>((f - first) % 2)) = v;
    }
    add_shape(set, std::move(shape), label, source, where);
  }
  return set;
}

LandmarkSet parse_landmarks_json(std::string_view text, const std::string& source) {
  const Json doc = parse_json(text, source);
  const Json& shapes = member(doc, "shapes", source, "header");
  if (!shapes.is_array()) parse_fail(source, "shapes", "expected an array");
  LandmarkSet set;
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    const std::string where = "record " + std::to_string(i);
    const Json& rec = shapes[i];
    const Json& pts = member(rec, "points", source, where);
    if (!pts.is_array()) parse_fail(source, where, "\"points\" must be an array of [x, y] pairs");
    KAds shape;
    shape.points.resize(static_cast<Index>(pts.size()), 2);
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const Json& xy = pts[j];
      if (!xy.is_array() || xy.size() != 2 || !xy[0].is_number() || !xy[1].is_number())
        parse_fail(source, where + ", landmark " + std::to_string(j), "expected an [x, y] pair of numbers");
      shape.points(static_cast<Index>(j), 0) = xy[0].get<double>();
      shape.points(static_cast<Index>(j), 1) = xy[1].get<double>();
    }
    std::optional<int> label;
    if (const auto it = rec.find("label"); it != rec.end() && !it->is_null()) {
      if (!it->is_number_integer()) parse_fail(source, where, "label must be an integer");
      label = it->get<int>();
    }
    add_shape(set, std::move(shape), label, source, where);
  }
  return set;
}

}  // namespace

LandmarkSet parse_landmarks(std::string_view text, const std::string& source) {
  const auto first = text.find_first_not_of(" \t\r\n");
  LandmarkSet set = (first != std::string_view::npos && text[first] == '{') ? parse_landmarks_json(text, source)
                                                                             : parse_landmarks_csv(text, source);
  if (set.shapes.empty()) parse_fail(source, "content", "no shapes found");
  return set;
}

LandmarkSet read_landmarks(const std::filesystem::path& path) {
  return parse_landmarks(read_text_file(path), path.string());
}

std::string format_landmarks_csv(const LandmarkSet& set) {
  std::string out;
  for (std::size_t i = 0; i < set.shapes.size(); ++i) {
    bool first = true;
    if (set.labels) {
      out += std::to_string((*set.labels)[i]);
      first = false;
    }
    const KAds& s = set.shapes[i];
    for (Index j = 0; j < s.size(); ++j)
      for (Index c = 0; c < 2; ++c) {
        if (!first) out += ',';
        out += format_double(s.points(j, c));
        first = false;
      }
    out += '\n';
  }
  return out;
}

#define NGR_INSTANTIATE(S)                                                         \
  template std::string format_dataset<S>(const Dataset<S>&);                      \
  template void write_dataset<S>(const std::filesystem::path&, const Dataset<S>&); \
  template std::string format_model<S>(const Model<S>&);                          \
  template void write_model<S>(const std::filesystem::path&, const Model<S>&);

NGR_INSTANTIATE(double)
NGR_INSTANTIATE(Complex)

#undef NGR_INSTANTIATE

}  // namespace ngr
