#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "closure/raster.hpp"

namespace closure {

/// Lossless 8-bit grayscale PNG. Fixed encoder settings and no time or text
/// chunks, so equal images always encode to equal bytes.
std::vector<std::uint8_t> encode_png(const StimulusImage& img);

/// Throws IoError on malformed input. Files are stored without palette
/// metadata, so the background is taken from the top-left pixel (always
/// background for inscribed stimuli) and the stroke as its full-contrast
/// inverse.
StimulusImage decode_png(std::span<const std::uint8_t> bytes);

StimulusImage read_png(const std::filesystem::path& path);

}  // namespace closure
