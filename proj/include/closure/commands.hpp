#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "closure/dataset.hpp"

namespace closure {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitIo = 2 };

/// Options shared by the subcommands. Overrides are validated before any
/// file is written.
struct RunConfig {
  std::filesystem::path out;
  int canvas_size = 224;
  double radius = 80.0;
  double stroke_width = 2.0;
  bool antialias = false;
  RotationScheme rotation_scheme = RotationScheme::Uniform15;
  double margin = 0.05;
  int removal_for_vertex_report = 10;
  unsigned workers = 0;  // 0 = available parallelism

  GenerationConfig generation() const;
  unsigned resolved_workers() const;
  /// Throws std::invalid_argument.
  void validate() const;
};

/// Train split plus ten test splits and their manifests under cfg.out.
int cmd_generate(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Fits the template baseline on the training split and writes one
/// prediction CSV per test split into `predictions_dir`.
int cmd_baseline(const std::filesystem::path& dataset_root, const std::filesystem::path& predictions_dir,
                 const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Scores test_<pp>.csv files from `predictions_dir` and writes report.json,
/// accuracy_by_removal.csv, accuracy_by_vertices.csv and plot_data.json into
/// `report_dir`.
int cmd_score(const std::filesystem::path& dataset_root, const std::filesystem::path& predictions_dir,
              const std::string& model_name, const std::filesystem::path& report_dir, const RunConfig& cfg,
              std::ostream& out, std::ostream& err);

/// Full command line: `generate | baseline | score` with flags.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::filesystem::path prediction_path(const std::filesystem::path& predictions_dir, Split split);

}  // namespace closure
