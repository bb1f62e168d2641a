#include "closure/baseline.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <tuple>
#include <string_view>
#include <unordered_map>

#include "closure/errors.hpp"
#include "closure/parallel.hpp"
#include "closure/png_codec.hpp"

namespace closure {

namespace {

std::string_view bytes_of(const std::vector<std::uint8_t>& v) {
  return {reinterpret_cast<const char*>(v.data()), v.size()};
}

// 16384 * 255^2 fits in 32 bits, so each chunk sums without widening.
std::uint64_t ssd_range(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
  std::uint64_t total = 0;
  std::uint32_t acc = 0;
  std::size_t i = 0;
  constexpr std::size_t kChunk = 16384;
  while (i < n) {
    const std::size_t stop = std::min(n, i + kChunk);
    acc = 0;
    for (; i < stop; ++i) {
      const int d = static_cast<int>(a[i]) - static_cast<int>(b[i]);
      acc += static_cast<std::uint32_t>(d * d);
    }
    total += acc;
  }
  return total;
}

}  // namespace

std::uint64_t squared_distance(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
  if (a.size() != b.size()) throw ValidationError("pixel buffers differ in size");
  return ssd_range(a.data(), b.data(), a.size());
}

bool operator==(const TemplateModel& a, const TemplateModel& b) {
  return a.width_ == b.width_ && a.height_ == b.height_ && a.templates_ == b.templates_;
}

TemplateModel TemplateModel::fit(std::vector<Template> templates, int width, int height) {
  if (templates.empty()) throw ValidationError("cannot fit a template model on an empty training set");
  const std::size_t expected = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  for (const auto& t : templates) {
    if (t.pixels.size() != expected) {
      throw ValidationError("template " + t.image_id + " has " + std::to_string(t.pixels.size()) +
                            " pixels, expected " + std::to_string(expected));
    }
    if (t.class_label < 0 || t.class_label >= kClassCount) {
      throw ValidationError("template " + t.image_id + " has label " + std::to_string(t.class_label));
    }
  }

  std::sort(templates.begin(), templates.end(), [](const Template& a, const Template& b) {
    return std::tie(a.class_label, a.image_id) < std::tie(b.class_label, b.image_id);
  });

  // Rotationally symmetric shapes legitimately repeat a raster within one
  // class; the same raster under two labels would make self-prediction
  // ambiguous.
  std::unordered_map<std::size_t, std::vector<std::size_t>> by_hash;
  for (std::size_t i = 0; i < templates.size(); ++i) {
    auto& bucket = by_hash[std::hash<std::string_view>{}(bytes_of(templates[i].pixels))];
    for (std::size_t j : bucket) {
      if (templates[j].pixels == templates[i].pixels && templates[j].class_label != templates[i].class_label) {
        throw ValidationError("templates " + templates[j].image_id + " and " + templates[i].image_id +
                              " are identical but labelled differently");
      }
    }
    bucket.push_back(i);
  }

  TemplateModel model;
  model.templates_ = std::move(templates);
  model.width_ = width;
  model.height_ = height;
  return model;
}

TemplateModel TemplateModel::fit(const DatasetManifest& manifest, const std::filesystem::path& root,
                                 unsigned workers) {
  if (manifest.records.empty()) throw ValidationError("cannot fit a template model on an empty training set");
  const int width = manifest.config.canvas.width;
  const int height = manifest.config.canvas.height;

  std::vector<Template> templates(manifest.records.size());
  parallel_for(manifest.records.size(), workers, [&](std::size_t i) {
    const auto& r = manifest.records[i];
    StimulusImage img = read_png(root / r.relative_path);
    if (img.width != width || img.height != height) {
      throw ValidationError("training image " + r.relative_path + " is " + std::to_string(img.width) + "x" +
                            std::to_string(img.height) + ", expected " + std::to_string(width) + "x" +
                            std::to_string(height));
    }
    templates[i] = {r.image_id, r.class_label, std::move(img.pixels)};
  });
  return fit(std::move(templates), width, height);
}

int TemplateModel::predict(const StimulusImage& image) const {
  if (image.width != width_ || image.height != height_ ||
      image.pixels.size() != static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_)) {
    throw ValidationError("image is " + std::to_string(image.width) + "x" + std::to_string(image.height) +
                          ", templates are " + std::to_string(width_) + "x" + std::to_string(height_));
  }

  // Templates are in tie-break order, so the first strict minimum wins. A
  // candidate is abandoned once its partial sum exceeds the best; equal
  // partial sums are carried to completion so ties are still seen.
  const std::size_t row = static_cast<std::size_t>(width_);
  const std::size_t block = row * 8;
  const std::size_t n = image.pixels.size();
  std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
  int best_label = -1;
  for (const Template& t : templates_) {
    std::uint64_t partial = 0;
    for (std::size_t start = 0; start < n && partial <= best; start += block) {
      partial += ssd_range(image.pixels.data() + start, t.pixels.data() + start, std::min(block, n - start));
    }
    if (partial < best) {
      best = partial;
      best_label = t.class_label;
    }
  }
  return best_label;
}

PredictionSet predict_split(const TemplateModel& model, const DatasetManifest& manifest,
                            const std::filesystem::path& root, unsigned workers, std::string model_name) {
  std::vector<int> labels(manifest.records.size());
  parallel_for(manifest.records.size(), workers, [&](std::size_t i) {
    const auto& r = manifest.records[i];
    const auto path = root / r.relative_path;
    if (!std::filesystem::exists(path)) throw IoError("missing image file " + path.string());
    labels[i] = model.predict(read_png(path));
  });

  PredictionSet out;
  out.model_name = std::move(model_name);
  for (std::size_t i = 0; i < labels.size(); ++i) out.entries[manifest.records[i].image_id] = labels[i];
  return out;
}

}  // namespace closure
