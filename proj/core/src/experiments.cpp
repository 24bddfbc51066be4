#include "ngr/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <thread>
#include <tuple>

#include "ngr/baselines.hpp"

namespace ngr {

std::string_view to_string(Preset p) {
  switch (p) {
    case Preset::fig3: return "fig3";
    case Preset::fig4: return "fig4";
    case Preset::table1: return "table1";
    case Preset::custom: return "custom";
  }
  return "?";
}

Preset parse_preset(std::string_view s) {
  if (s == "fig3") return Preset::fig3;
  if (s == "fig4") return Preset::fig4;
  if (s == "table1") return Preset::table1;
  if (s == "custom") return Preset::custom;
  throw Error(ErrorKind::usage, "unknown preset '" + std::string(s) + "' (expected fig3, fig4, table1)");
}

std::vector<double> preset_params(Preset p) {
  switch (p) {
    case Preset::fig3: return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    case Preset::fig4: return {0.01, 0.1, 0.5, 1.0, 1.5, 2.0};
    case Preset::table1: return {2, 4, 6, 8, 10};
    case Preset::custom: return {0.1};
  }
  return {};
}

int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("NGR_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min(v, 256L));
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string error_status(const Error& e) { return "error:" + std::string(to_string(e.kind())); }

ResultRow ng_row(std::span<const GrassmannPoint<double>> points, Index m, Metric metric, const FitConfig& base,
                 std::uint64_t seed) {
  ResultRow row;
  row.method = "NG";
  row.metric = std::string(to_string(metric));
  FitConfig config = base;
  config.metric = metric;
  Rng rng(seed);
  const auto t0 = Clock::now();
  try {
    const FitReport<double> report = fit_unsupervised<double>(points, m, config, rng);
    row.runtime_seconds = seconds_since(t0);
    row.explained_variance = report.explained_variance_ratio;
    row.status = report.converged ? "ok" : "max_iter";
  } catch (const Error& e) {
    row.runtime_seconds = seconds_since(t0);
    row.status = error_status(e);
  }
  return row;
}

ResultRow pga_row(std::span<const GrassmannPoint<double>> points, Index k, const FitConfig& base) {
  ResultRow row;
  row.method = "PGA";
  row.metric = "tangent";
  const auto t0 = Clock::now();
  try {
    const PgaModel<double> model = pga_fit<double>(points, k, base.karcher);
    row.explained_variance = pga_explained_variance<double>(model, points, k);
    row.runtime_seconds = seconds_since(t0);
    row.status = "ok";
  } catch (const Error& e) {
    row.runtime_seconds = seconds_since(t0);
    row.status = error_status(e);
  }
  return row;
}

SynthConfig preset_data(const SynthExperiment& x, double param) {
  SynthConfig c;
  c.num_points = 50;
  switch (x.preset) {
    case Preset::fig3:
      c.ambient_dim = 10, c.planted_dim = 3, c.subspace_dim = 1, c.sigma = param;
      break;
    case Preset::fig4:
      c.ambient_dim = 10, c.planted_dim = 5, c.subspace_dim = 2, c.sigma = param;
      break;
    case Preset::table1:
      c.ambient_dim = 30, c.planted_dim = 20, c.subspace_dim = 2, c.sigma = 0.1;
      break;
    case Preset::custom:
      c = x.custom_data;
      c.sigma = param;
      break;
  }
  return c;
}

std::vector<ResultRow> run_cell(const SynthExperiment& x, int rep, double param) {
  const std::uint64_t seed = x.seed + static_cast<std::uint64_t>(rep);
  SynthConfig data_config = preset_data(x, param);
  data_config.seed = seed;
  std::vector<ResultRow> rows;
  std::vector<GrassmannPoint<double>> points;
  try {
    points = generate<double>(data_config).points;
  } catch (const Error& e) {
    ResultRow row;
    row.method = "data";
    row.metric = "-";
    row.status = error_status(e);
    rows.push_back(row);
  }
  if (rows.empty()) {
    const Index p = data_config.subspace_dim;
    switch (x.preset) {
      case Preset::fig3:
        rows.push_back(ng_row(points, data_config.planted_dim, Metric::projection, x.fit, seed));
        rows.push_back(ng_row(points, data_config.planted_dim, Metric::geodesic, x.fit, seed));
        break;
      case Preset::fig4:
        // Both reduce to two dimensions: Gr(2, 3) for NG, two components for PGA.
        rows.push_back(ng_row(points, p + 1, Metric::projection, x.fit, seed));
        rows.push_back(pga_row(points, 2, x.fit));
        break;
      case Preset::table1: {
        const auto dim = static_cast<Index>(std::lround(param));
        if (dim <= 0 || dim % p != 0) throw Error(ErrorKind::usage, "table1: m~ must be a positive multiple of p");
        rows.push_back(ng_row(points, dim / p + p, Metric::projection, x.fit, seed));
        rows.push_back(pga_row(points, dim, x.fit));
        break;
      }
      case Preset::custom:
        rows.push_back(ng_row(points, x.custom_m, x.fit.metric, x.fit, seed));
        rows.push_back(pga_row(points, p * (x.custom_m - p), x.fit));
        break;
    }
  }
  for (auto& row : rows) {
    row.preset = std::string(to_string(x.preset));
    row.rep = rep;
    row.param = param;
  }
  return rows;
}

}  // namespace

std::vector<ResultRow> run_synth_experiment(const SynthExperiment& x) {
  if (x.reps < 1) throw Error(ErrorKind::usage, "reps must be at least 1");
  if (x.preset == Preset::custom) {
    x.custom_data.validate();
    if (!(x.custom_data.subspace_dim < x.custom_m && x.custom_m <= x.custom_data.ambient_dim))
      throw Error(ErrorKind::usage, "custom preset: need p < m <= n");
  }
  x.fit.optimizer.validate();
  const std::vector<double> params = x.params.empty() ? preset_params(x.preset) : x.params;
  for (double v : params)
    if (!std::isfinite(v) || v < 0.0) throw Error(ErrorKind::usage, "parameter values must be finite and >= 0");

  std::vector<std::pair<int, double>> cells;
  for (double param : params)
    for (int rep = 0; rep < x.reps; ++rep) cells.emplace_back(rep, param);

  std::vector<std::vector<ResultRow>> results(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        results[i] = run_cell(x, cells[i].first, cells[i].second);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int threads = std::min<int>(resolve_thread_count(x.threads), static_cast<int>(cells.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<ResultRow> rows;
  for (auto& cell : results)
    for (auto& row : cell) rows.push_back(std::move(row));
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.param, a.rep, a.method, a.metric) < std::tie(b.param, b.rep, b.method, b.metric);
  });
  return rows;
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string optional_number(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

std::string format_result_rows(const std::vector<ResultRow>& rows, bool timing) {
  std::string out = "preset,rep,param,method,metric,explained_variance";
  if (timing) out += ",runtime_seconds";
  out += ",status\n";
  for (const auto& r : rows) {
    out += csv_escape(r.preset) + ',' + std::to_string(r.rep) + ',' + format_double(r.param) + ',' +
           csv_escape(r.method) + ',' + csv_escape(r.metric) + ',' + optional_number(r.explained_variance);
    if (timing) out += ',' + format_double(r.runtime_seconds);
    out += ',' + csv_escape(r.status) + '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Shapes

namespace {

template <class F>
ShapesRow timed_row(const std::string& method, F&& body) {
  ShapesRow row;
  row.method = method;
  const auto t0 = Clock::now();
  try {
    body(row);
    if (row.status.empty()) row.status = "ok";
  } catch (const Error& e) {
    row.status = error_status(e);
  }
  row.runtime_seconds = seconds_since(t0);
  return row;
}

}  // namespace

std::vector<ShapesRow> run_shapes_experiment(const LandmarkSet& data, const ShapesExperiment& x) {
  if (x.m < 1) throw Error(ErrorKind::usage, "m must be at least 1");
  if (x.supervised && !data.labels) throw Error(ErrorKind::usage, "--supervised needs a labeled landmark file");
  x.fit.optimizer.validate();

  std::vector<GrassmannPoint<Complex>> points;
  points.reserve(data.shapes.size());
  for (std::size_t i = 0; i < data.shapes.size(); ++i) {
    try {
      points.push_back(kads_to_grassmann(data.shapes[i]));
    } catch (const Error& e) {
      throw e.with_index(i);
    }
  }
  const Index n = points.front().ambient_dim();
  if (x.m + 1 > n)
    throw Error(ErrorKind::usage, "m + 1 must not exceed k - 1 = " + std::to_string(n));
  // Zero variance makes every ratio below undefined; report it up front.
  if (!(variance<Complex>(points, x.fit.karcher) > 0.0))
    throw Error(ErrorKind::degenerate_input, "all shapes are identical up to similarity: zero variance");

  const std::span<const int> labels =
      data.labels ? std::span<const int>(*data.labels) : std::span<const int>();
  const bool have_labels = data.labels.has_value();
  auto accuracy = [&](std::span<const GrassmannPoint<Complex>> pts) -> std::optional<double> {
    if (!have_labels) return std::nullopt;
    return gknn_loo<Complex>(pts, labels, x.knn, Metric::geodesic).accuracy;
  };
  const Index components = x.m;

  std::vector<ShapesRow> rows;
  rows.push_back(timed_row("gKNN", [&](ShapesRow& row) {
    row.accuracy = accuracy(points);
    row.explained_variance = 1.0;
  }));
  rows.push_back(timed_row("gKNN+PGA", [&](ShapesRow& row) {
    const PgaModel<Complex> model = pga_fit<Complex>(points, components, x.fit.karcher);
    row.explained_variance = pga_explained_variance<Complex>(model, points, components);
    row.accuracy = accuracy(pga_reduce<Complex>(model, points, components));
  }));
  rows.push_back(timed_row("gKNN+NG", [&](ShapesRow& row) {
    Rng rng(x.seed);
    const FitReport<Complex> report = fit_unsupervised<Complex>(points, x.m + 1, x.fit, rng);
    row.explained_variance = report.explained_variance_ratio;
    row.accuracy = accuracy(project_all(report.map, std::span<const GrassmannPoint<Complex>>(points)));
    if (!report.converged) row.status = "max_iter";
  }));
  if (x.supervised) {
    rows.push_back(timed_row("gKNN+sPGA", [&](ShapesRow& row) {
      const PgaModel<Complex> model = spga_fit<Complex>(points, labels, components, x.fit.karcher);
      row.explained_variance = pga_explained_variance<Complex>(model, points, components);
      row.accuracy = accuracy(pga_reduce<Complex>(model, points, components));
    }));
    rows.push_back(timed_row("gKNN+sNG", [&](ShapesRow& row) {
      Rng rng(x.seed);
      const FitReport<Complex> report =
          fit_supervised<Complex>(points, labels, x.m + 1, x.affinity, x.fit, rng);
      row.explained_variance = report.explained_variance_ratio;
      row.accuracy = accuracy(project_all(report.map, std::span<const GrassmannPoint<Complex>>(points)));
      if (!report.converged) row.status = "max_iter";
    }));
  }
  return rows;
}

std::string format_shapes_rows(const std::vector<ShapesRow>& rows, bool timing) {
  std::string out = "method,accuracy,explained_variance";
  if (timing) out += ",runtime_seconds";
  out += ",status\n";
  for (const auto& r : rows) {
    out += csv_escape(r.method) + ',' + optional_number(r.accuracy) + ',' + optional_number(r.explained_variance);
    if (timing) out += ',' + format_double(r.runtime_seconds);
    out += ',' + csv_escape(r.status) + '\n';
  }
  return out;
}

}  // namespace ngr
