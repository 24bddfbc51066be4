#pragma once

// Experiment drivers: the synthetic NG-vs-PGA and projection-vs-geodesic
// protocols, and the landmark-shape classification pipeline. Results are
// tidy tables, one row per observation.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ngr/datagen.hpp"
#include "ngr/io.hpp"

namespace ngr {

enum class Preset { fig3, fig4, table1, custom };

std::string_view to_string(Preset p);
Preset parse_preset(std::string_view s);

struct SynthExperiment {
  Preset preset = Preset::fig3;
  int reps = 20;
  std::uint64_t seed = 0;
  /// Worker threads; 0 means NGR_THREADS from the environment, else the
  /// hardware concurrency.
  int threads = 0;
  /// Overrides the preset's parameter grid (sigma values, or m~ for table1).
  std::vector<double> params;
  /// Used by Preset::custom only: data config (sigma comes from params) and
  /// the reduced dimension; PGA keeps the same number of real dimensions.
  SynthConfig custom_data;
  Index custom_m = 2;
  FitConfig fit;
};

struct ResultRow {
  std::string preset;
  int rep = 0;
  double param = 0.0;
  std::string method;  // NG or PGA
  std::string metric;  // NG fitting metric; "tangent" for PGA
  std::optional<double> explained_variance;
  double runtime_seconds = 0.0;
  std::string status;  // ok, max_iter, or error:<kind>
};

/// Default grid of the preset: sigma values, or m~ for table1.
std::vector<double> preset_params(Preset p);

/// Runs every (rep, param) cell; rep r uses seed + r. Rows are sorted by
/// (param, rep, method, metric) whatever the thread count.
std::vector<ResultRow> run_synth_experiment(const SynthExperiment& config);

/// CSV with header preset,rep,param,method,metric,explained_variance,
/// runtime_seconds,status. Without timing the runtime column is left out,
/// which makes the table a pure function of the seed.
std::string format_result_rows(const std::vector<ResultRow>& rows, bool timing = true);

int resolve_thread_count(int requested);

struct ShapesExperiment {
  Index m = 10;  // submanifold dimension: NG maps into Gr(1, C^(m+1)), PGA keeps m components
  int knn = 5;
  bool supervised = false;
  AffinityConfig affinity;
  FitConfig fit;
  std::uint64_t seed = 0;
};

struct ShapesRow {
  std::string method;  // gKNN, gKNN+PGA, gKNN+NG, gKNN+sPGA, gKNN+sNG
  std::optional<double> accuracy;
  std::optional<double> explained_variance;
  double runtime_seconds = 0.0;
  std::string status;
};

/// Raw, PGA and NG rows always; sPGA and sNG rows when supervised (labels
/// required). Accuracy needs labels; it is left empty otherwise.
std::vector<ShapesRow> run_shapes_experiment(const LandmarkSet& data, const ShapesExperiment& config);

std::string format_shapes_rows(const std::vector<ShapesRow>& rows, bool timing = true);

}  // namespace ngr
