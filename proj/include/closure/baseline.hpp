#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "closure/dataset.hpp"
#include "closure/protocol.hpp"
#include "closure/raster.hpp"

namespace closure {

/// Nearest-template classifier over raw pixels. Immutable after fit.
class TemplateModel {
 public:
  struct Template {
    std::string image_id;
    int class_label = 0;
    std::vector<std::uint8_t> pixels;
  };

  /// Throws ValidationError when `templates` is empty, buffers disagree in
  /// size, or two identical rasters carry different labels.
  static TemplateModel fit(std::vector<Template> templates, int width, int height);

  /// Reads every image of a (training) manifest from `root`.
  static TemplateModel fit(const DatasetManifest& manifest, const std::filesystem::path& root, unsigned workers = 1);

  /// Label of the template with the smallest sum of squared pixel
  /// differences. Ties go to the smallest label, then the smallest image id.
  int predict(const StimulusImage& image) const;

  const std::vector<Template>& templates() const { return templates_; }
  int width() const { return width_; }
  int height() const { return height_; }

  friend bool operator==(const TemplateModel& a, const TemplateModel& b);

 private:
  std::vector<Template> templates_;  // sorted by (class_label, image_id)
  int width_ = 0;
  int height_ = 0;
};

inline bool operator==(const TemplateModel::Template& a, const TemplateModel::Template& b) {
  return a.image_id == b.image_id && a.class_label == b.class_label && a.pixels == b.pixels;
}

/// Sum of squared differences between equally sized buffers.
std::uint64_t squared_distance(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b);

/// Predicts every record of a split, reading images from `root`.
PredictionSet predict_split(const TemplateModel& model, const DatasetManifest& manifest,
                            const std::filesystem::path& root, unsigned workers, std::string model_name = "baseline");

}  // namespace closure
