#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "closure/geometry.hpp"

namespace closure {

struct CanvasConfig {
  int width = 224;
  int height = 224;
  double stroke_width_px = 2.0;
  bool antialias = false;

  void validate() const;

  friend bool operator==(const CanvasConfig&, const CanvasConfig&) = default;
};

/// Background and stroke intensities for one stimulus.
struct Palette {
  std::uint8_t background_value = 255;
  std::uint8_t foreground_value = 0;
};

/// Light -> white background with black strokes, Dark -> the inverse.
Palette palette_for(Background bg);

/// Single-channel 8-bit image, row-major.
struct StimulusImage {
  int width = 0;
  int height = 0;
  std::uint8_t background_value = 255;
  std::uint8_t foreground_value = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
  }
};

StimulusImage blank_image(int width, int height, Palette palette);

/// Draws segments as butt-capped thick lines: a pixel is stroked when its
/// center projects inside the segment and lies within stroke_width/2 of it.
/// With antialias on, coverage is estimated on a fixed 4x4 subpixel grid.
void draw_segments(StimulusImage& img, std::span<const Segment> segments, double stroke_width_px,
                   bool antialias);

/// Throws std::invalid_argument if the spec is invalid, disagrees with the
/// canvas stroke width, or would clip the canvas.
StimulusImage render(const PolygonSpec& spec, const CanvasConfig& cfg);

/// Number of pixels equal to the image's foreground value.
std::size_t stroke_pixel_count(const StimulusImage& img);

}  // namespace closure
