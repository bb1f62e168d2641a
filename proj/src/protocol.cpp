#include "closure/protocol.hpp"

#include <charconv>
#include <set>
#include <sstream>
#include <stdexcept>

#include "closure/errors.hpp"
#include "closure/io.hpp"
#include "json.hpp"

namespace closure {

using ordered_json = nlohmann::ordered_json;

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string list_ids(const std::vector<std::string>& ids, std::size_t limit = 20) {
  std::string out;
  for (std::size_t i = 0; i < ids.size() && i < limit; ++i) out += (i ? ", " : "") + ids[i];
  if (ids.size() > limit) out += ", ... (" + std::to_string(ids.size()) + " total)";
  return out;
}

bool label_in_range(int label) { return label >= 0 && label < kClassCount; }

}  // namespace

PredictionSet parse_predictions_csv(std::string_view text, std::string model_name) {
  PredictionSet out;
  out.model_name = std::move(model_name);

  std::vector<std::string> duplicates;
  std::vector<std::string> malformed;
  bool have_header = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view line = trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (line.empty()) continue;

    const auto fields = split_fields(line);
    if (!have_header) {
      if (fields.size() < 2 || trim(fields[0]) != "image_id" || trim(fields[1]) != "predicted_label" ||
          fields.size() > 3 || (fields.size() == 3 && trim(fields[2]) != "confidence")) {
        throw ValidationError("prediction file header must be image_id,predicted_label[,confidence]");
      }
      have_header = true;
      continue;
    }

    if (fields.size() < 2 || fields.size() > 3) {
      malformed.push_back("line " + std::to_string(line_no));
      continue;
    }
    const std::string id(trim(fields[0]));
    const std::string_view label_text = trim(fields[1]);
    int label = 0;
    const auto [ptr, ec] = std::from_chars(label_text.data(), label_text.data() + label_text.size(), label);
    if (id.empty() || ec != std::errc() || ptr != label_text.data() + label_text.size()) {
      malformed.push_back("line " + std::to_string(line_no) + (id.empty() ? "" : " (" + id + ")"));
      continue;
    }
    if (!out.entries.emplace(id, label).second) duplicates.push_back(id);
  }

  if (!have_header) throw ValidationError("prediction file is empty");
  if (!duplicates.empty()) throw ValidationError("duplicated image_id in predictions: " + list_ids(duplicates));
  if (!malformed.empty()) throw ValidationError("malformed prediction rows: " + list_ids(malformed));
  return out;
}

PredictionSet read_predictions_csv(const std::filesystem::path& path, std::string model_name) {
  const std::string text = read_text(path);
  try {
    return parse_predictions_csv(text, std::move(model_name));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string predictions_to_csv(const DatasetManifest& manifest, const PredictionSet& preds) {
  check_coverage(manifest, preds);
  std::string out = "image_id,predicted_label\n";
  for (const auto& r : manifest.records) {
    out += r.image_id + "," + std::to_string(preds.entries.at(r.image_id)) + "\n";
  }
  return out;
}

void check_coverage(const DatasetManifest& manifest, const PredictionSet& preds) {
  std::vector<std::string> missing;
  std::vector<std::string> out_of_range;
  std::set<std::string_view> expected;
  for (const auto& r : manifest.records) {
    expected.insert(r.image_id);
    const auto it = preds.entries.find(r.image_id);
    if (it == preds.entries.end()) {
      missing.push_back(r.image_id);
    } else if (!label_in_range(it->second)) {
      out_of_range.push_back(r.image_id + "=" + std::to_string(it->second));
    }
  }
  std::vector<std::string> extra;
  for (const auto& [id, label] : preds.entries) {
    if (!expected.contains(id)) extra.push_back(id);
  }

  if (missing.empty() && extra.empty() && out_of_range.empty()) return;
  std::string msg = "predictions of '" + preds.model_name + "' do not cover split " + manifest.split.name() + ":";
  if (!missing.empty()) msg += "\n  missing ids: " + list_ids(missing);
  if (!extra.empty()) msg += "\n  extra ids: " + list_ids(extra);
  if (!out_of_range.empty()) msg += "\n  labels outside 0..9: " + list_ids(out_of_range);
  throw ValidationError(msg);
}

Tally score_tally(const DatasetManifest& manifest, const PredictionSet& preds) {
  check_coverage(manifest, preds);
  Tally t;
  for (const auto& r : manifest.records) {
    ++t.total;
    if (preds.entries.at(r.image_id) == r.class_label) ++t.correct;
  }
  return t;
}

double score(const DatasetManifest& manifest, const PredictionSet& preds) {
  return score_tally(manifest, preds).accuracy();
}

std::map<int, double> accuracy_curve(std::span<const DatasetManifest> manifests, std::span<const PredictionSet> preds) {
  if (manifests.size() != preds.size()) throw ValidationError("one prediction set is required per test split");
  std::map<int, double> curve;
  for (std::size_t i = 0; i < manifests.size(); ++i) {
    const int level = manifests[i].split.removal_pct;
    if (!curve.emplace(level, score(manifests[i], preds[i])).second) {
      throw ValidationError("removal level " + std::to_string(level) + " given twice");
    }
  }
  if (curve.size() != kRemovalLevels.size()) {
    throw ValidationError("accuracy curve needs all " + std::to_string(kRemovalLevels.size()) + " removal levels");
  }
  return curve;
}

std::map<int, double> accuracy_by_vertices(const DatasetManifest& manifest, const PredictionSet& preds) {
  check_coverage(manifest, preds);
  std::map<int, Tally> groups;
  for (const auto& r : manifest.records) {
    Tally& t = groups[r.n_sides];
    ++t.total;
    if (preds.entries.at(r.image_id) == r.class_label) ++t.correct;
  }
  std::map<int, double> out;
  for (const auto& [n, t] : groups) out[n] = t.accuracy();
  return out;
}

std::optional<int> closure_indicator(const std::map<int, double>& curve, double chance, double margin) {
  for (int level : kRemovalLevels) {
    if (!curve.contains(level)) {
      throw std::invalid_argument("accuracy curve is missing removal level " + std::to_string(level));
    }
  }
  std::optional<int> sustained;
  for (int level : kRemovalLevels) {
    if (level == 0) continue;
    if (!(curve.at(level) > chance + margin)) break;
    sustained = level;
  }
  return sustained;
}

std::map<int, double> ClosureReport::accuracy_by_removal() const {
  std::map<int, double> out;
  for (const auto& [level, t] : by_removal) out[level] = t.accuracy();
  return out;
}

std::map<int, double> ClosureReport::accuracy_by_vertices(int removal_pct) const {
  std::map<int, double> out;
  for (const auto& [key, t] : by_vertices) {
    if (key.first == removal_pct) out[key.second] = t.accuracy();
  }
  return out;
}

ClosureReport build_report(std::string model_name, std::span<const DatasetManifest> manifests,
                           std::span<const PredictionSet> preds, double margin) {
  if (!(margin >= 0.0)) throw std::invalid_argument("margin must be non-negative");
  ClosureReport report;
  report.model_name = std::move(model_name);
  report.margin = margin;

  // accuracy_curve enforces one split per level and full coverage.
  const auto curve = accuracy_curve(manifests, preds);
  for (std::size_t i = 0; i < manifests.size(); ++i) {
    const int level = manifests[i].split.removal_pct;
    report.by_removal[level] = score_tally(manifests[i], preds[i]);
    for (const auto& r : manifests[i].records) {
      Tally& t = report.by_vertices[{level, r.n_sides}];
      ++t.total;
      if (preds[i].entries.at(r.image_id) == r.class_label) ++t.correct;
    }
  }
  report.max_sustained_removal = closure_indicator(curve, report.chance_level, margin);
  return report;
}

std::string report_to_json(const ClosureReport& report) {
  ordered_json j;
  j["model_name"] = report.model_name;
  j["chance_level"] = report.chance_level;
  j["margin"] = report.margin;
  j["threshold"] = report.chance_level + report.margin;
  j["sustained_rule"] =
      "accuracy > chance_level + margin at every removal level from 10 through max_sustained_removal; "
      "removal 0 excluded";
  j["max_sustained_removal"] =
      report.max_sustained_removal ? ordered_json(*report.max_sustained_removal) : ordered_json(nullptr);

  ordered_json removal = ordered_json::array();
  for (const auto& [level, t] : report.by_removal) {
    removal.push_back({{"removal_pct", level}, {"correct", t.correct}, {"total", t.total}, {"accuracy", t.accuracy()}});
  }
  j["accuracy_by_removal"] = std::move(removal);

  ordered_json vertices = ordered_json::array();
  for (const auto& [key, t] : report.by_vertices) {
    vertices.push_back({{"removal_pct", key.first},
                        {"n_sides", key.second},
                        {"correct", t.correct},
                        {"total", t.total},
                        {"accuracy", t.accuracy()}});
  }
  j["accuracy_by_vertices"] = std::move(vertices);
  return j.dump(2) + "\n";
}

std::string removal_curve_csv(const ClosureReport& report) {
  std::string out = "removal_pct,correct,total,accuracy\n";
  for (const auto& [level, t] : report.by_removal) {
    out += std::to_string(level) + "," + std::to_string(t.correct) + "," + std::to_string(t.total) + "," +
           ordered_json(t.accuracy()).dump() + "\n";
  }
  return out;
}

std::string vertex_curve_csv(const ClosureReport& report, int removal_pct) {
  std::string out = "n_sides,correct,total,accuracy\n";
  bool any = false;
  for (const auto& [key, t] : report.by_vertices) {
    if (key.first != removal_pct) continue;
    any = true;
    out += std::to_string(key.second) + "," + std::to_string(t.correct) + "," + std::to_string(t.total) + "," +
           ordered_json(t.accuracy()).dump() + "\n";
  }
  if (!any) throw std::invalid_argument("report has no removal level " + std::to_string(removal_pct));
  return out;
}

std::string plot_data_json(const ClosureReport& report, int vertex_removal_pct) {
  ordered_json j;
  j["model_name"] = report.model_name;

  ordered_json removal_x = ordered_json::array();
  ordered_json removal_y = ordered_json::array();
  for (const auto& [level, acc] : report.accuracy_by_removal()) {
    removal_x.push_back(level);
    removal_y.push_back(acc);
  }
  j["accuracy_vs_removal"] = {{"x_label", "removal_pct"}, {"y_label", "accuracy"}, {"x", removal_x}, {"y", removal_y}};

  const auto by_vertex = report.accuracy_by_vertices(vertex_removal_pct);
  if (by_vertex.empty()) throw std::invalid_argument("report has no removal level " + std::to_string(vertex_removal_pct));
  ordered_json vertex_x = ordered_json::array();
  ordered_json vertex_y = ordered_json::array();
  for (const auto& [n, acc] : by_vertex) {
    vertex_x.push_back(n);
    vertex_y.push_back(acc);
  }
  j["accuracy_vs_vertices"] = {{"removal_pct", vertex_removal_pct},
                               {"x_label", "n_sides"},
                               {"y_label", "accuracy"},
                               {"x", vertex_x},
                               {"y", vertex_y}};
  j["reference_lines"] = {{"chance_level", report.chance_level},
                          {"threshold", report.chance_level + report.margin}};
  return j.dump(2) + "\n";
}

}  // namespace closure
