#include "cli.hpp"

#include <chrono>
#include <filesystem>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "json.hpp"
#include "ngr/baselines.hpp"
#include "ngr/experiments.hpp"
#include "ngr/io.hpp"

namespace ngr::cli {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage: return kExitUsage;
    case ErrorKind::convergence: return kExitConvergence;
    default: return kExitData;
  }
}

// Writes to a file, or to `out` when the path is empty or "-".
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_text_file(path, text);
  }
}

Metric metric_from(const std::string& s) {
  try {
    return parse_metric(s);
  } catch (const Error&) {
    throw Error(ErrorKind::usage, "unknown metric '" + s + "' (expected projection or geodesic)");
  }
}

struct CommonFit {
  std::string metric = "projection";
  std::uint64_t seed = 0;
  int restarts = 1;
  int max_iter = 300;
  double grad_tol = 1e-6;

  void add(CLI::App* cmd) {
    cmd->add_option("--metric", metric, "Fitting distance: projection or geodesic")->capture_default_str();
    cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
    cmd->add_option("--restarts", restarts, "Optimizer runs (extra runs start at random points)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--max-iter", max_iter, "Optimizer iteration cap")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--grad-tol", grad_tol, "Riemannian gradient norm tolerance")->capture_default_str();
  }

  FitConfig config() const {
    FitConfig c;
    c.metric = metric_from(metric);
    c.restarts = restarts;
    c.optimizer.max_iter = max_iter;
    c.optimizer.grad_tol = grad_tol;
    c.optimizer.validate();
    return c;
  }
};

// ---------------------------------------------------------------------------
// fit

struct FitArgs {
  std::string data;
  Index m = 0;
  bool supervised = false;
  int k_within = 5;
  int k_between = 5;
  std::string out;
  std::string report;
  bool no_timing = false;
  CommonFit fit;
};

template <FieldScalar S>
int do_fit(const FitArgs& a, Dataset<S>& data, std::ostream& out) {
  if (a.supervised && !data.labels) throw Error(ErrorKind::usage, "--supervised needs a dataset with labels");
  const FitConfig config = a.fit.config();
  Rng rng(a.fit.seed);
  const auto t0 = std::chrono::steady_clock::now();
  int code = kExitOk;
  std::optional<FitReport<S>> report;
  std::optional<NestedMap<S>> fallback;
  std::string failure;
  try {
    report = a.supervised ? fit_supervised<S>(data.points, *data.labels, a.m,
                                              AffinityConfig{a.k_within, a.k_between}, config, rng)
                          : fit_unsupervised<S>(data.points, a.m, config, rng);
    if (!report->converged) {
      code = kExitConvergence;
      failure = "did not converge within " + std::to_string(a.fit.max_iter) + " iterations";
    }
  } catch (const ConvergenceErrorWith<NestedMap<S>>& e) {
    fallback = e.best();
    failure = e.what();
    code = kExitConvergence;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const NestedMap<S>& map = report ? report->map : *fallback;

  Model<S> model{map, {}};
  model.metadata.metric = a.fit.metric;
  model.metadata.seed = a.fit.seed;
  model.metadata.supervised = a.supervised;
  if (report) model.metadata.loss = report->final_loss;
  if (!a.out.empty()) write_model(a.out, model);

  Json rep;
  rep["m"] = a.m;
  rep["metric"] = a.fit.metric;
  rep["supervised"] = a.supervised;
  rep["seed"] = a.fit.seed;
  rep["status"] = code == kExitOk ? "converged" : "not_converged";
  if (!failure.empty()) rep["message"] = failure;
  if (report) {
    rep["final_loss"] = report->final_loss;
    rep["grad_norm"] = report->grad_norm;
    rep["iterations"] = report->iterations;
    rep["explained_variance"] = report->explained_variance_ratio;
    rep["loss_trace"] = report->loss_trace;
  } else {
    try {
      rep["explained_variance"] = explained_variance_ratio<S>(map, data.points, config.karcher);
    } catch (const Error&) {
    }
  }
  if (!a.no_timing) rep["wall_time_seconds"] = wall;
  const std::string text = rep.dump(1) + "\n";
  if (!a.report.empty()) {
    write_text_file(a.report, text);
  } else if (a.out.empty() || a.out != "-") {
    out << text;
  }
  return code;
}

// ---------------------------------------------------------------------------
// project / reconstruct

struct MapArgs {
  std::string model;
  std::string data;
  std::string out;
};

template <FieldScalar S>
int do_map(const MapArgs& a, const Model<S>& model, const Dataset<S>& data, bool reconstruct, std::ostream& out) {
  for (std::size_t i = 0; i < data.points.size(); ++i)
    if (data.points[i].ambient_dim() != model.map.ambient_dim() || data.points[i].dim() != model.map.subspace_dim())
      throw Error(ErrorKind::shape, "dimension mismatch: model maps Gr(" + std::to_string(model.map.subspace_dim()) +
                                        ", " + std::to_string(model.map.ambient_dim()) + ") but the data live on Gr(" +
                                        std::to_string(data.points[i].dim()) + ", " +
                                        std::to_string(data.points[i].ambient_dim()) + ")");
  Dataset<S> result;
  result.labels = data.labels;
  result.points = reconstruct ? reconstruct_all<S>(model.map, data.points) : project_all<S>(model.map, data.points);
  emit(a.out, format_dataset(result), out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  std::string preset = "fig3";
  int reps = 20;
  std::uint64_t seed = 0;
  int threads = 0;
  std::vector<double> params;
  std::string out;
  bool no_timing = false;
  Index num_points = 50, n = 10, planted = 3, p = 1, m = 2;
  double b_std = 0.1;
  std::string metric = "projection";
};

// ---------------------------------------------------------------------------
// generate

struct GenerateArgs {
  Index num_points = 50, n = 10, m = 3, p = 1;
  double sigma = 0.0;
  double b_std = 0.1;
  std::uint64_t seed = 0;
  std::string field = "real";
  std::optional<double> two_class;
  std::string out;
  std::string truth;
};

template <FieldScalar S>
int do_generate(const GenerateArgs& a, std::ostream& out) {
  SynthConfig c;
  c.num_points = a.num_points;
  c.ambient_dim = a.n;
  c.planted_dim = a.m;
  c.subspace_dim = a.p;
  c.sigma = a.sigma;
  c.b_std = a.b_std;
  c.seed = a.seed;
  Dataset<S> data;
  std::optional<NestedMap<S>> truth;
  if (a.two_class) {
    LabeledSynthData<S> g = generate_two_class<S>(c, *a.two_class);
    data.points = std::move(g.data.points);
    data.labels = std::move(g.labels);
    truth = std::move(g.data.ground_truth);
  } else {
    SynthData<S> g = generate<S>(c);
    data.points = std::move(g.points);
    truth = std::move(g.ground_truth);
  }
  emit(a.out, format_dataset(data), out);
  if (!a.truth.empty()) {
    Model<S> model{*truth, {}};
    model.metadata.seed = a.seed;
    write_model(a.truth, model);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sequence

struct SequenceArgs {
  std::string data;
  std::vector<Index> dims;
  std::string out;
  CommonFit fit;
};

template <FieldScalar S>
int do_sequence(const SequenceArgs& a, const Dataset<S>& data, std::ostream& out) {
  Rng rng(a.fit.seed);
  const std::vector<SequenceEntry> entries = nested_sequence<S>(data.points, a.dims, a.fit.config(), rng);
  std::string text = "m,explained_variance,status\n";
  for (const auto& e : entries) {
    text += std::to_string(e.m) + ',' + (e.ratio ? format_double(*e.ratio) : std::string()) + ',';
    std::string status = e.error.empty() ? "ok" : e.error;
    for (char& ch : status)
      if (ch == ',' || ch == '\n') ch = ';';
    text += status + '\n';
  }
  emit(a.out, text, out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nested Grassmann dimensionality reduction"};
  app.name("ngr");
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a nested Grassmann map to a dataset");
  fit_cmd->add_option("dataset", fit.data, "Dataset file")->required();
  fit_cmd->add_option("--m", fit.m, "Reduced ambient dimension m (target Gr(p, m))")->required();
  fit_cmd->add_flag("--supervised", fit.supervised, "Fit the supervised loss (needs labels)");
  fit_cmd->add_option("--k-within", fit.k_within, "Within-class neighbours for the affinity")->capture_default_str();
  fit_cmd->add_option("--k-between", fit.k_between, "Between-class neighbours for the affinity")->capture_default_str();
  fit_cmd->add_option("--out", fit.out, "Model output file");
  fit_cmd->add_option("--report", fit.report, "Report output file (JSON); stdout when omitted");
  fit_cmd->add_flag("--no-timing", fit.no_timing, "Leave wall time out of the report");
  fit.fit.add(fit_cmd);

  MapArgs proj, recon;
  auto* proj_cmd = app.add_subcommand("project", "Project a dataset to Gr(p, m) with a fitted model");
  auto* recon_cmd = app.add_subcommand("reconstruct", "Reconstruct a dataset in Gr(p, n) with a fitted model");
  for (auto [cmd, a] : {std::pair{proj_cmd, &proj}, std::pair{recon_cmd, &recon}}) {
    cmd->add_option("--model", a->model, "Model file")->required();
    cmd->add_option("--data", a->data, "Dataset file")->required();
    cmd->add_option("--out", a->out, "Output dataset file; stdout when omitted");
  }

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Run a synthetic experiment and write a tidy CSV table");
  synth_cmd->add_option("--preset", synth.preset, "fig3, fig4, table1 or custom")->capture_default_str();
  synth_cmd->add_option("--reps", synth.reps, "Repetitions per parameter value")->check(CLI::PositiveNumber)->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "Base seed; repetition r uses seed + r")->capture_default_str();
  synth_cmd->add_option("--threads", synth.threads, "Worker threads (default: NGR_THREADS or all cores)");
  synth_cmd->add_option("--params", synth.params, "Parameter grid override (sigma values, or m~ for table1)")
      ->delimiter(',');
  synth_cmd->add_option("--out", synth.out, "CSV output file; stdout when omitted");
  synth_cmd->add_flag("--no-timing", synth.no_timing, "Omit the runtime column");
  synth_cmd->add_option("--N", synth.num_points, "custom: sample count")->capture_default_str();
  synth_cmd->add_option("--n", synth.n, "custom: ambient dimension")->capture_default_str();
  synth_cmd->add_option("--planted-m", synth.planted, "custom: planted dimension")->capture_default_str();
  synth_cmd->add_option("--p", synth.p, "custom: subspace dimension")->capture_default_str();
  synth_cmd->add_option("--m", synth.m, "custom: reduced dimension of the fit")->capture_default_str();
  synth_cmd->add_option("--b-std", synth.b_std, "custom: standard deviation of B")->capture_default_str();
  synth_cmd->add_option("--metric", synth.metric, "custom: NG fitting metric")->capture_default_str();

  ShapesExperiment shapes;
  std::string shapes_path, shapes_out;
  bool shapes_no_timing = false;
  std::string shapes_metric = "projection";
  auto* shapes_cmd = app.add_subcommand("shapes", "Shape pipeline: gKNN accuracy and explained variance");
  shapes_cmd->add_option("landmarks", shapes_path, "Landmark file (CSV or JSON)")->required();
  shapes_cmd->add_option("--m", shapes.m, "Submanifold dimension (NG: Gr(1, C^(m+1)); PGA: m components)")
      ->capture_default_str();
  shapes_cmd->add_flag("--supervised", shapes.supervised, "Also run sPGA and sNG");
  shapes_cmd->add_option("--knn", shapes.knn, "Neighbours for gKNN")->capture_default_str();
  shapes_cmd->add_option("--k-within", shapes.affinity.k_within)->capture_default_str();
  shapes_cmd->add_option("--k-between", shapes.affinity.k_between)->capture_default_str();
  shapes_cmd->add_option("--seed", shapes.seed)->capture_default_str();
  shapes_cmd->add_option("--metric", shapes_metric, "NG fitting metric")->capture_default_str();
  shapes_cmd->add_option("--out", shapes_out, "CSV output file; stdout when omitted");
  shapes_cmd->add_flag("--no-timing", shapes_no_timing, "Omit the runtime column");

  GenerateArgs gen;
  double two_class = -1.0;
  auto* gen_cmd = app.add_subcommand("generate", "Write a synthetic dataset");
  gen_cmd->add_option("--N", gen.num_points)->capture_default_str();
  gen_cmd->add_option("--n", gen.n)->capture_default_str();
  gen_cmd->add_option("--m", gen.m, "Planted dimension")->capture_default_str();
  gen_cmd->add_option("--p", gen.p)->capture_default_str();
  gen_cmd->add_option("--sigma", gen.sigma)->capture_default_str();
  gen_cmd->add_option("--b-std", gen.b_std)->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed)->capture_default_str();
  gen_cmd->add_option("--field", gen.field, "real or complex")->capture_default_str();
  gen_cmd->add_option("--two-class", two_class, "Emit two labeled classes with this planted spread");
  gen_cmd->add_option("--out", gen.out, "Dataset output file; stdout when omitted");
  gen_cmd->add_option("--truth", gen.truth, "Also write the planted map as a model file");

  ShapeFamilyConfig fam;
  std::string fam_out;
  auto* gs_cmd = app.add_subcommand("generate-shapes", "Write a synthetic two-class landmark file");
  gs_cmd->add_option("--landmarks", fam.landmarks)->capture_default_str();
  gs_cmd->add_option("--per-class", fam.per_class)->capture_default_str();
  gs_cmd->add_option("--nuisance", fam.nuisance)->capture_default_str();
  gs_cmd->add_option("--signal", fam.signal)->capture_default_str();
  gs_cmd->add_option("--noise", fam.noise)->capture_default_str();
  gs_cmd->add_option("--seed", fam.seed)->capture_default_str();
  gs_cmd->add_option("--out", fam_out, "CSV output file; stdout when omitted");

  SequenceArgs seq;
  auto* seq_cmd = app.add_subcommand("sequence", "Explained variance over a sequence of reduced dimensions");
  seq_cmd->add_option("dataset", seq.data)->required();
  seq_cmd->add_option("--dims", seq.dims, "Strictly increasing m values")->delimiter(',')->required();
  seq_cmd->add_option("--out", seq.out, "CSV output file; stdout when omitted");
  seq.fit.add(seq_cmd);

  std::vector<const char*> argv{"ngr"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << tool_version() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "ngr: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*fit_cmd) {
      AnyDataset data = read_dataset(fit.data);
      return std::visit([&](auto& d) { return do_fit(fit, d, out); }, data);
    }
    if (*proj_cmd || *recon_cmd) {
      const bool reconstruct = static_cast<bool>(*recon_cmd);
      const MapArgs& a = reconstruct ? recon : proj;
      const AnyModel model = read_model(a.model);
      const AnyDataset data = read_dataset(a.data);
      if (model.index() != data.index())
        throw Error(ErrorKind::shape, "field mismatch between model and dataset");
      if (const auto* m = std::get_if<Model<double>>(&model))
        return do_map(a, *m, std::get<Dataset<double>>(data), reconstruct, out);
      return do_map(a, std::get<Model<Complex>>(model), std::get<Dataset<Complex>>(data), reconstruct, out);
    }
    if (*synth_cmd) {
      SynthExperiment x;
      x.preset = parse_preset(synth.preset);
      x.reps = synth.reps;
      x.seed = synth.seed;
      x.threads = synth.threads;
      x.params = synth.params;
      x.custom_data.num_points = synth.num_points;
      x.custom_data.ambient_dim = synth.n;
      x.custom_data.planted_dim = synth.planted;
      x.custom_data.subspace_dim = synth.p;
      x.custom_data.b_std = synth.b_std;
      x.custom_m = synth.m;
      x.fit.metric = metric_from(synth.metric);
      emit(synth.out, format_result_rows(run_synth_experiment(x), !synth.no_timing), out);
      return kExitOk;
    }
    if (*shapes_cmd) {
      shapes.fit.metric = metric_from(shapes_metric);
      const LandmarkSet set = read_landmarks(shapes_path);
      emit(shapes_out, format_shapes_rows(run_shapes_experiment(set, shapes), !shapes_no_timing), out);
      return kExitOk;
    }
    if (*gen_cmd) {
      if (two_class >= 0.0) gen.two_class = two_class;
      Field field;
      try {
        field = parse_field(gen.field);
      } catch (const Error&) {
        throw Error(ErrorKind::usage, "--field must be real or complex");
      }
      return field == Field::real ? do_generate<double>(gen, out) : do_generate<Complex>(gen, out);
    }
    if (*gs_cmd) {
      const LabeledShapes shapes_data = generate_shape_families(fam);
      emit(fam_out, format_landmarks_csv(LandmarkSet{shapes_data.shapes, shapes_data.labels}), out);
      return kExitOk;
    }
    if (*seq_cmd) {
      AnyDataset data = read_dataset(seq.data);
      return std::visit([&](auto& d) { return do_sequence(seq, d, out); }, data);
    }
  } catch (const Error& e) {
    err << "ngr: " << to_string(e.kind()) << " error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "ngr: error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace ngr::cli
