#include "closure/raster.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace closure {

namespace {

constexpr int kSubsamples = 4;

struct SegmentFrame {
  Point origin;
  double ux = 0.0;
  double uy = 0.0;
  double length = 0.0;
  double half_width = 0.0;

  bool covers(double px, double py) const {
    const double dx = px - origin.x;
    const double dy = py - origin.y;
    const double along = dx * ux + dy * uy;
    if (along < 0.0 || along > length) return false;
    const double across = dx * uy - dy * ux;
    return std::abs(across) <= half_width;
  }
};

SegmentFrame frame_of(const Segment& s, double stroke_width) {
  const double len = s.length();
  if (!(len > 0.0)) throw std::invalid_argument("zero-length segment");
  return {s.p0, (s.p1.x - s.p0.x) / len, (s.p1.y - s.p0.y) / len, len, stroke_width / 2.0};
}

}  // namespace

void CanvasConfig::validate() const {
  if (width <= 0 || height <= 0) throw std::invalid_argument("canvas dimensions must be positive");
  if (!(stroke_width_px >= 1.0)) throw std::invalid_argument("stroke width must be at least 1 px");
}

Palette palette_for(Background bg) {
  if (bg == Background::Light) return {255, 0};
  return {0, 255};
}

StimulusImage blank_image(int width, int height, Palette palette) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("canvas dimensions must be positive");
  if (palette.background_value == palette.foreground_value) {
    throw std::invalid_argument("background and foreground intensities must differ");
  }
  StimulusImage img;
  img.width = width;
  img.height = height;
  img.background_value = palette.background_value;
  img.foreground_value = palette.foreground_value;
  img.pixels.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
                    palette.background_value);
  return img;
}

void draw_segments(StimulusImage& img, std::span<const Segment> segments, double stroke_width_px,
                   bool antialias) {
  const double hw = stroke_width_px / 2.0;

  if (!antialias) {
    for (const Segment& s : segments) {
      const SegmentFrame f = frame_of(s, stroke_width_px);
      // Pixel (x, y) has its center at (x + 0.5, y + 0.5).
      const int x0 = std::max(0, static_cast<int>(std::floor(std::min(s.p0.x, s.p1.x) - hw - 0.5)));
      const int x1 = std::min(img.width - 1, static_cast<int>(std::ceil(std::max(s.p0.x, s.p1.x) + hw)));
      const int y0 = std::max(0, static_cast<int>(std::floor(std::min(s.p0.y, s.p1.y) - hw - 0.5)));
      const int y1 = std::min(img.height - 1, static_cast<int>(std::ceil(std::max(s.p0.y, s.p1.y) + hw)));
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          if (f.covers(x + 0.5, y + 0.5)) {
            img.pixels[static_cast<std::size_t>(y) * img.width + x] = img.foreground_value;
          }
        }
      }
    }
    return;
  }

  // Coverage is the union over all segments, so overlapping strokes never
  // darken twice.
  std::vector<SegmentFrame> frames;
  frames.reserve(segments.size());
  for (const Segment& s : segments) frames.push_back(frame_of(s, stroke_width_px));

  std::vector<std::uint8_t> hits(img.pixels.size(), 0);
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const Segment& s = segments[i];
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min(s.p0.x, s.p1.x) - hw - 1.0)));
    const int x1 = std::min(img.width - 1, static_cast<int>(std::ceil(std::max(s.p0.x, s.p1.x) + hw)));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min(s.p0.y, s.p1.y) - hw - 1.0)));
    const int y1 = std::min(img.height - 1, static_cast<int>(std::ceil(std::max(s.p0.y, s.p1.y) + hw)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const std::size_t idx = static_cast<std::size_t>(y) * img.width + x;
        int count = 0;
        for (int sy = 0; sy < kSubsamples; ++sy) {
          for (int sx = 0; sx < kSubsamples; ++sx) {
            const double px = x + (sx + 0.5) / kSubsamples;
            const double py = y + (sy + 0.5) / kSubsamples;
            bool inside = false;
            for (const SegmentFrame& f : frames) {
              if (f.covers(px, py)) {
                inside = true;
                break;
              }
            }
            count += inside ? 1 : 0;
          }
        }
        hits[idx] = static_cast<std::uint8_t>(count);
      }
    }
  }

  const int bg = img.background_value;
  const int fg = img.foreground_value;
  constexpr int total = kSubsamples * kSubsamples;
  for (std::size_t idx = 0; idx < hits.size(); ++idx) {
    if (hits[idx] == 0) continue;
    // Integer rounding keeps the blend reproducible across platforms.
    const int num = bg * (total - hits[idx]) + fg * hits[idx];
    img.pixels[idx] = static_cast<std::uint8_t>((num + total / 2) / total);
  }
}

StimulusImage render(const PolygonSpec& spec, const CanvasConfig& cfg) {
  cfg.validate();
  spec.validate();
  if (spec.stroke_width_px != cfg.stroke_width_px) {
    throw std::invalid_argument("polygon stroke width does not match canvas stroke width");
  }
  if (!spec.fits_canvas(cfg.width, cfg.height)) {
    throw std::invalid_argument("polygon with center (" + std::to_string(spec.center.x) + ", " +
                                std::to_string(spec.center.y) + ") and radius " +
                                std::to_string(spec.circumradius_px) + " clips the " +
                                std::to_string(cfg.width) + "x" + std::to_string(cfg.height) +
                                " canvas");
  }

  StimulusImage img = blank_image(cfg.width, cfg.height, palette_for(spec.background));
  const std::vector<Segment> segments = side_segments(polygon_vertices(spec), spec.removal_pct);
  draw_segments(img, segments, cfg.stroke_width_px, cfg.antialias);
  return img;
}

std::size_t stroke_pixel_count(const StimulusImage& img) {
  return static_cast<std::size_t>(std::count(img.pixels.begin(), img.pixels.end(), img.foreground_value));
}

}  // namespace closure
