#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "closure/geometry.hpp"
#include "closure/raster.hpp"

namespace closure {

enum class Position { Center, Offset };

std::string_view to_string(Position pos);
Position parse_position(std::string_view text);

inline constexpr int kClassCount = kMaxSides - kMinSides + 1;
inline constexpr int kSplitSize = kClassCount * kRotationsPerShape * 2 * 2;
inline constexpr std::string_view kDatasetVersion = "1.0";

/// The training split, or one test split at a fixed removal level.
struct Split {
  enum class Kind { Train, Test };
  Kind kind = Kind::Train;
  int removal_pct = 0;

  static Split train() { return {Kind::Train, 0}; }
  static Split test(int removal_pct) { return {Kind::Test, removal_pct}; }

  /// "train" or "test_<pp>" with a two-digit removal level; also the
  /// split's directory and manifest stem.
  std::string name() const;
  static Split parse(std::string_view name);

  friend bool operator==(const Split&, const Split&) = default;
};

/// Everything needed to turn a record's factors into pixels.
struct GenerationConfig {
  CanvasConfig canvas;
  double circumradius_px = 80.0;
  RotationScheme rotation_scheme = RotationScheme::Uniform15;
  /// Offset position is shifted this far left and down from the canvas center.
  int offset_px = 16;

  /// Throws std::invalid_argument if any polygon of the design would be invalid
  /// or clip the canvas.
  void validate() const;

  friend bool operator==(const GenerationConfig&, const GenerationConfig&) = default;
};

struct StimulusRecord {
  std::string image_id;
  std::string relative_path;
  int class_label = 0;
  int n_sides = 3;
  int theta_index = 0;
  double theta_deg = 0.0;
  Background background = Background::Light;
  Position position = Position::Center;
  int removal_pct = 0;
  Split split;
};

struct DatasetManifest {
  std::string dataset_version{kDatasetVersion};
  Split split;
  GenerationConfig config;
  std::vector<StimulusRecord> records;
};

/// poly{n}_rot{i}_bg{w|b}_pos{c|o}_rem{pp}
std::string image_id_for(int n_sides, int theta_index, Background bg, Position pos, int removal_pct);

Point position_center(Position pos, const GenerationConfig& cfg);

/// The 320 records of one split in canonical order: sides, rotation,
/// background, position.
std::vector<StimulusRecord> enumerate_split(Split split, const GenerationConfig& cfg);

PolygonSpec spec_for(const StimulusRecord& rec, const GenerationConfig& cfg);

StimulusImage render_record(const StimulusRecord& rec, const GenerationConfig& cfg);

std::filesystem::path manifest_path(const std::filesystem::path& root, Split split);
std::filesystem::path manifest_csv_path(const std::filesystem::path& root, Split split);

// Manifest (de)serialization. JSONL: a header object on the first line, then
// one object per record. CSV: the same record fields as columns.
std::string manifest_to_jsonl(const DatasetManifest& manifest);
std::string manifest_to_csv(const DatasetManifest& manifest);
DatasetManifest parse_manifest_jsonl(std::string_view text);

/// Throws ValidationError listing every violation, prefixed with the split
/// name and the offending record ids.
void validate_manifest(const DatasetManifest& manifest);

/// Parse and validate. Throws IoError or ValidationError.
DatasetManifest load_manifest(const std::filesystem::path& path);

/// Every training record has exactly one counterpart with identical factors
/// in each test split. Throws ValidationError.
void check_alignment(const DatasetManifest& train, const std::vector<DatasetManifest>& tests);

/// Every record's file exists, decodes and matches the canvas size.
void verify_files(const std::filesystem::path& root, const DatasetManifest& manifest);

/// Validated config plus the enumerated records; nothing touches disk.
DatasetManifest plan_split(Split split, const GenerationConfig& cfg);

void write_split_images(const std::filesystem::path& root, const DatasetManifest& manifest, unsigned workers);

/// JSONL and CSV manifests at the dataset root.
void write_manifest(const std::filesystem::path& root, const DatasetManifest& manifest);

/// Renders and writes one split plus its manifests. Images are produced by
/// `workers` threads; the output is independent of the worker count.
DatasetManifest generate_split(const std::filesystem::path& root, Split split,
                               const GenerationConfig& cfg, unsigned workers);

DatasetManifest generate_training_set(const std::filesystem::path& root, const GenerationConfig& cfg,
                                      unsigned workers);

/// One split per removal level, ordered 0..90.
std::vector<DatasetManifest> generate_test_sets(const std::filesystem::path& root,
                                                const GenerationConfig& cfg, unsigned workers);

/// Loads the training manifest and all ten test manifests from a dataset root.
struct LoadedDataset {
  DatasetManifest train;
  std::vector<DatasetManifest> tests;
};
LoadedDataset load_dataset(const std::filesystem::path& root);

}  // namespace closure
