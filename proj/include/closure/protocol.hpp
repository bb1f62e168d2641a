#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "closure/dataset.hpp"

namespace closure {

/// One model's predicted class label per image id.
struct PredictionSet {
  std::string model_name;
  std::map<std::string, int> entries;
};

/// Parses the exchange CSV: header `image_id,predicted_label` with an optional
/// third `confidence` column that is ignored. Duplicate ids and malformed rows
/// are ValidationErrors naming the offending ids or lines.
PredictionSet parse_predictions_csv(std::string_view text, std::string model_name);
PredictionSet read_predictions_csv(const std::filesystem::path& path, std::string model_name);

/// Rows follow the manifest's record order, so equal inputs give equal bytes.
std::string predictions_to_csv(const DatasetManifest& manifest, const PredictionSet& preds);

struct Tally {
  std::size_t correct = 0;
  std::size_t total = 0;

  double accuracy() const { return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total); }
};

/// Throws ValidationError naming missing ids, extra ids and out-of-range
/// labels when `preds` does not cover `manifest` exactly.
void check_coverage(const DatasetManifest& manifest, const PredictionSet& preds);

Tally score_tally(const DatasetManifest& manifest, const PredictionSet& preds);

/// Fraction of records whose predicted label equals the ground truth.
double score(const DatasetManifest& manifest, const PredictionSet& preds);

/// Accuracy per removal level. `manifests[i]` is scored with `preds[i]`;
/// every removal level must appear exactly once.
std::map<int, double> accuracy_curve(std::span<const DatasetManifest> manifests,
                                     std::span<const PredictionSet> preds);

/// Accuracy per side count within one split.
std::map<int, double> accuracy_by_vertices(const DatasetManifest& manifest, const PredictionSet& preds);

inline constexpr double kChanceLevel = 1.0 / kClassCount;
inline constexpr double kDefaultMargin = 0.05;

/// Largest removal level R such that accuracy > chance + margin at every
/// level from 10 through R. Level 0 is ignored. Empty when level 10 already
/// fails. Throws std::invalid_argument unless the curve has all ten levels.
std::optional<int> closure_indicator(const std::map<int, double>& curve, double chance, double margin);

struct ClosureReport {
  std::string model_name;
  double chance_level = kChanceLevel;
  double margin = kDefaultMargin;
  std::map<int, Tally> by_removal;
  /// Keyed by (removal_pct, n_sides).
  std::map<std::pair<int, int>, Tally> by_vertices;
  std::optional<int> max_sustained_removal;

  std::map<int, double> accuracy_by_removal() const;
  std::map<int, double> accuracy_by_vertices(int removal_pct) const;
};

ClosureReport build_report(std::string model_name, std::span<const DatasetManifest> manifests,
                           std::span<const PredictionSet> preds, double margin);

std::string report_to_json(const ClosureReport& report);
/// removal_pct,correct,total,accuracy
std::string removal_curve_csv(const ClosureReport& report);
/// n_sides,correct,total,accuracy at one removal level
std::string vertex_curve_csv(const ClosureReport& report, int removal_pct);
/// Both curves as x/y series plus the chance and threshold lines.
std::string plot_data_json(const ClosureReport& report, int vertex_removal_pct);

}  // namespace closure
