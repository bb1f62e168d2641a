#include "closure/commands.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "closure/baseline.hpp"
#include "closure/errors.hpp"
#include "closure/io.hpp"
#include "closure/parallel.hpp"
#include "closure/protocol.hpp"

namespace closure {

namespace fs = std::filesystem;

namespace {

/// Runs a command body and maps failures onto exit codes.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

}  // namespace

GenerationConfig RunConfig::generation() const {
  GenerationConfig g;
  g.canvas.width = canvas_size;
  g.canvas.height = canvas_size;
  g.canvas.stroke_width_px = stroke_width;
  g.canvas.antialias = antialias;
  g.circumradius_px = radius;
  g.rotation_scheme = rotation_scheme;
  return g;
}

unsigned RunConfig::resolved_workers() const { return workers == 0 ? default_workers() : workers; }

void RunConfig::validate() const {
  generation().validate();
  if (!(margin >= 0.0 && margin < 1.0)) throw std::invalid_argument("margin must be in [0, 1)");
  if (!is_valid_removal(removal_for_vertex_report)) {
    throw std::invalid_argument("--removal-for-vertex-report must be one of 0, 10, ..., 90");
  }
}

fs::path prediction_path(const fs::path& predictions_dir, Split split) {
  return predictions_dir / (split.name() + ".csv");
}

int cmd_generate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    cfg.validate();
    if (cfg.out.empty()) throw std::invalid_argument("--out is required");
    const GenerationConfig gen = cfg.generation();
    const unsigned workers = cfg.resolved_workers();

    std::vector<DatasetManifest> manifests;
    manifests.push_back(plan_split(Split::train(), gen));
    for (int pct : kRemovalLevels) manifests.push_back(plan_split(Split::test(pct), gen));

    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    if (ec) throw IoError("cannot create output root " + cfg.out.string() + ": " + ec.message());

    const auto start = std::chrono::steady_clock::now();
    for (const auto& m : manifests) write_split_images(cfg.out, m, workers);

    // All manifests or none: a failure part-way removes the ones already
    // written by this run.
    std::vector<fs::path> written;
    try {
      for (const auto& m : manifests) {
        write_manifest(cfg.out, m);
        written.push_back(manifest_path(cfg.out, m.split));
        written.push_back(manifest_csv_path(cfg.out, m.split));
      }
    } catch (...) {
      for (const auto& p : written) fs::remove(p, ec);
      throw;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    out << "train: " << manifests.front().records.size() << " images\n";
    out << "test: " << (manifests.size() - 1) << " splits x " << manifests.back().records.size() << " images\n";
    std::size_t total = 0;
    for (const auto& m : manifests) total += m.records.size();
    out << "total: " << total << " images, " << manifests.size() << " manifests, rotation scheme "
        << to_string(gen.rotation_scheme) << ", " << seconds << " s\n";
    return int{kExitOk};
  });
}

int cmd_baseline(const fs::path& dataset_root, const fs::path& predictions_dir, const RunConfig& cfg,
                 std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const unsigned workers = cfg.resolved_workers();
    const LoadedDataset ds = load_dataset(dataset_root);
    const TemplateModel model = TemplateModel::fit(ds.train, dataset_root, workers);

    std::vector<PredictionSet> all;
    for (const auto& split : ds.tests) all.push_back(predict_split(model, split, dataset_root, workers));

    std::error_code ec;
    fs::create_directories(predictions_dir, ec);
    if (ec) throw IoError("cannot create " + predictions_dir.string() + ": " + ec.message());
    for (std::size_t i = 0; i < ds.tests.size(); ++i) {
      const auto path = prediction_path(predictions_dir, ds.tests[i].split);
      write_text_atomic(path, predictions_to_csv(ds.tests[i], all[i]));
      out << path.string() << ": " << all[i].entries.size() << " rows\n";
    }
    return int{kExitOk};
  });
}

int cmd_score(const fs::path& dataset_root, const fs::path& predictions_dir, const std::string& model_name,
              const fs::path& report_dir, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    cfg.validate();
    const LoadedDataset ds = load_dataset(dataset_root);

    std::vector<PredictionSet> preds;
    for (const auto& split : ds.tests) {
      const auto path = prediction_path(predictions_dir, split.split);
      if (!fs::exists(path)) throw IoError("missing prediction file " + path.string());
      preds.push_back(read_predictions_csv(path, model_name));
      try {
        check_coverage(split, preds.back());
      } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
      }
    }

    const ClosureReport report = build_report(model_name, ds.tests, preds, cfg.margin);

    std::error_code ec;
    fs::create_directories(report_dir, ec);
    if (ec) throw IoError("cannot create " + report_dir.string() + ": " + ec.message());
    write_text_atomic(report_dir / "report.json", report_to_json(report));
    write_text_atomic(report_dir / "accuracy_by_removal.csv", removal_curve_csv(report));
    write_text_atomic(report_dir / "accuracy_by_vertices.csv", vertex_curve_csv(report, cfg.removal_for_vertex_report));
    write_text_atomic(report_dir / "plot_data.json", plot_data_json(report, cfg.removal_for_vertex_report));

    out << "model: " << model_name << "\n";
    for (const auto& [level, acc] : report.accuracy_by_removal()) {
      out << "  removal " << level << "%: accuracy " << acc << "\n";
    }
    out << "max sustained removal (margin " << report.margin << "): ";
    if (report.max_sustained_removal) {
      out << *report.max_sustained_removal << "%\n";
    } else {
      out << "none\n";
    }
    out << "report written to " << report_dir.string() << "\n";
    return int{kExitOk};
  });
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Incomplete-polygon stimulus generator and closure benchmark"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string scheme = "uniform15";

  auto* gen = app.add_subcommand("generate", "Render the training split and ten test splits");
  gen->add_option("--out", cfg.out, "Dataset root")->required();
  gen->add_option("--canvas-size", cfg.canvas_size, "Canvas width and height in pixels");
  gen->add_option("--radius", cfg.radius, "Polygon circumradius in pixels");
  gen->add_option("--stroke-width", cfg.stroke_width, "Stroke width in pixels");
  gen->add_option("--rotation-scheme", scheme, "uniform15 or formula")
      ->check(CLI::IsMember({"uniform15", "formula"}));
  gen->add_flag("--antialias", cfg.antialias, "Antialiased strokes (not two-valued)");
  gen->add_option("--workers", cfg.workers, "Worker threads (0 = all cores)");

  fs::path dataset_root;
  fs::path predictions_dir;
  auto* base = app.add_subcommand("baseline", "Fit the template baseline and predict every test split");
  base->add_option("dataset", dataset_root, "Dataset root")->required();
  base->add_option("--out", predictions_dir, "Prediction directory (default <dataset>/predictions/baseline)");
  base->add_option("--workers", cfg.workers, "Worker threads (0 = all cores)");

  std::string model_name;
  fs::path report_dir;
  auto* sc = app.add_subcommand("score", "Score prediction files and emit the closure report");
  sc->add_option("dataset", dataset_root, "Dataset root")->required();
  sc->add_option("predictions", predictions_dir, "Directory with test_<pp>.csv files")->required();
  sc->add_option("--model", model_name, "Model name (default: predictions directory name)");
  sc->add_option("--out", report_dir, "Report directory (default <predictions>/report)");
  sc->add_option("--margin", cfg.margin, "Margin above chance for sustained accuracy");
  sc->add_option("--removal-for-vertex-report", cfg.removal_for_vertex_report,
                 "Removal level for the accuracy-by-vertices table");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitValidation;
  }
  cfg.rotation_scheme = parse_rotation_scheme(scheme);

  if (gen->parsed()) return cmd_generate(cfg, out, err);
  if (base->parsed()) {
    if (predictions_dir.empty()) predictions_dir = dataset_root / "predictions" / "baseline";
    return cmd_baseline(dataset_root, predictions_dir, cfg, out, err);
  }
  if (model_name.empty()) {
    model_name = fs::absolute(predictions_dir).lexically_normal().filename().string();
    if (model_name.empty()) model_name = fs::absolute(predictions_dir).lexically_normal().parent_path().filename().string();
  }
  if (report_dir.empty()) report_dir = predictions_dir / "report";
  return cmd_score(dataset_root, predictions_dir, model_name, report_dir, cfg, out, err);
}

}  // namespace closure
